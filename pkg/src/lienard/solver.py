"""Exact parametric solutions of Chiellini-integrable Lienard equations.

Along a trajectory the parameter ``w`` satisfies the defining relation

    g(x)/f(x) = C^{-1} exp(F(w, k)),      x' = (g/f)(x) / w,
    dw/dt = f(x) (w^2 + w + k),

so ``x(w)`` comes from inverting ``g/f`` and ``t(w)`` from a quadrature.

Two drivers are provided. :func:`solve_parametric` samples one branch of
``x(w)`` over a ``w`` interval, as the relation is usually stated.
:func:`solve_trajectory` follows the motion forward in time across turning
points (``x' = 0``, i.e. ``w = +-inf``) and folds (``f(x) = 0``, where
``w`` reverses and the root of the inversion moves to the adjacent
monotone cell). It works in ``u = 1/w``, which is regular at turning
points: ``dt/du = -1 / (f(x) (1 + u + k u^2))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from ._numerics import adaptive_quadrature, bracketed_root
from .exceptions import (
    BracketError,
    DomainError,
    LienardError,
    PoleError,
    SingularCoefficientError,
    TimeRangeError,
)
from .funcmodel import BlackBox, FunctionSpec, antiderivative
from .integrability import LienardSystem
from .kernel import (
    F_at_infinity,
    F_closed,
    KernelRegime,
    RegimeTag,
    kernel_poles,
    quadratic_q,
)

__all__ = [
    "InitialConditions",
    "ChielliniParams",
    "KZeroParams",
    "ParametricSolution",
    "fit_initial_conditions",
    "solve_parametric",
    "solve_trajectory",
    "solve_k_zero",
    "emit_time_series",
    "characteristic_time",
    "DEFAULT_SAMPLES",
]

DEFAULT_SAMPLES = 512
# per-interval quadrature tolerance; sums over a few thousand intervals stay near 1e-9
_STEP_TOL = 1e-12


@dataclass(frozen=True)
class InitialConditions:
    x0: float
    xdot0: float

    def __post_init__(self):
        if not (math.isfinite(self.x0) and math.isfinite(self.xdot0)):
            raise ValueError("initial conditions must be finite")
        if self.xdot0 == 0.0:
            raise ValueError("xdot0 = 0: the substitution v = 1/x' does not exist")


@dataclass(frozen=True)
class ChielliniParams:
    """Constants of one exact solution.

    ``C_inv`` is fitted on the sign component of ``w0``. ``C^{-1}`` on the
    other sign of ``w`` follows from continuity of ``g/f`` through the
    turning point ``w = +-inf``.
    """

    k: float
    C_inv: float
    w0: float
    x0: float
    t0: float = 0.0
    regime: Optional[KernelRegime] = None
    time_direction: int = 1

    def __post_init__(self):
        if self.C_inv == 0.0 or not math.isfinite(self.C_inv):
            raise ValueError("C_inv must be finite and nonzero")
        if not math.isfinite(self.t0):
            raise ValueError("t0 must be finite")
        if self.regime is None:
            object.__setattr__(self, "regime", KernelRegime.for_k(self.k))

    def c_inv_for(self, sign) -> float:
        s0 = 1 if self.w0 > 0 else -1
        if sign == s0:
            return self.C_inv
        return self.C_inv * math.exp(F_at_infinity(self.regime, s0) - F_at_infinity(self.regime, -s0))

    def target(self, w) -> float:
        """``C^{-1} e^{F(w)}``, the value ``g/f`` must take at parameter ``w``."""
        return self.c_inv_for(1 if w > 0 else -1) * math.exp(F_closed(w, self.regime))

    def target_u(self, u) -> float:
        if u == 0.0:
            return self.C_inv * math.exp(F_at_infinity(self.regime, 1 if self.w0 > 0 else -1))
        return self.c_inv_for(1 if u > 0 else -1) * math.exp(F_closed(1.0 / u, self.regime))


@dataclass(frozen=True)
class KZeroParams:
    """``g = A f``: ``int f dx = A ln|1/v + A| - 1/v + K1`` with ``v = 1/x'``."""

    A: float
    K1: float
    v0: float
    x0: float
    t0: float = 0.0
    k: float = 0.0


@dataclass(frozen=True)
class ParametricSolution:
    """Samples ``(w, x, t, xdot)`` of an exact solution.

    ``branch`` holds, per sample, the index of the monotone cell of
    ``g/f`` the root was taken from. ``truncated`` explains why sampling
    stopped early (``None`` when the requested range was covered).
    For the k=0 family the parameter column holds ``v = 1/x'``.
    """

    w: np.ndarray
    x: np.ndarray
    t: np.ndarray
    xdot: np.ndarray
    branch: np.ndarray
    w_range: Tuple[float, float]
    system: Optional[LienardSystem]
    params: Union[ChielliniParams, KZeroParams]
    time_direction: int = 1
    truncated: Optional[str] = None
    xddot: Optional[np.ndarray] = field(default=None, repr=False)
    meta: dict = field(default_factory=dict)

    @property
    def samples(self):
        return list(zip(self.w.tolist(), self.x.tolist(), self.t.tolist(), self.xdot.tolist()))

    @property
    def t_span(self):
        return float(np.min(self.t)), float(np.max(self.t))

    def __len__(self):
        return len(self.t)

    def evaluate(self, t):
        """``(x, xdot)`` at times ``t`` by monotone Hermite interpolation."""
        out = emit_time_series(self, np.atleast_1d(np.asarray(t, dtype=float)))
        return out[:, 1], out[:, 2]


def characteristic_time(sys: LienardSystem, x0) -> float:
    """``1/|f(x0)|``: the damping time scale of the linearised motion at ``x0``."""
    f0 = float(sys.f(x0))
    if f0 == 0.0:
        raise SingularCoefficientError("f(x0) = 0: no damping time scale", x0)
    return 1.0 / abs(f0)


def _sign(v):
    return 1 if v > 0 else -1


def fit_initial_conditions(sys: LienardSystem, k, ic: InitialConditions):
    """Map ``(x0, x'0)`` to the constants of the exact solution.

    ``w0 = (g/f)(x0) / x'0`` and ``C^{-1} = (g/f)(x0) e^{-F(w0)}`` with
    ``t0 = 0``. For ``k = 0`` the k=0 family is used (``g = A f``) and a
    :class:`KZeroParams` is returned.
    """
    k = float(k)
    f0 = float(sys.f(ic.x0))
    if f0 == 0.0:
        raise SingularCoefficientError(f"f(x0) = 0 at x0={ic.x0}", ic.x0)
    R0 = float(sys.ratio_function()(ic.x0))
    if k == 0.0:
        if sys.k not in (None, 0.0):
            raise ValueError(f"system was built with k={sys.k}; the k=0 branch needs g = A f")
        return _fit_k_zero(sys.f, R0, ic)
    if sys.k == 0.0:
        raise ValueError("k=0 family: call with k=0 (solve_k_zero)")
    if R0 == 0.0:
        raise PoleError("g(x0) = 0 puts w0 on the kernel pole w = 0", (0.0,))
    w0 = R0 / ic.xdot0
    q0 = quadratic_q(w0, k)
    if q0 == 0.0:
        raise PoleError(f"w0={w0} is a root of w^2 + w + k", kernel_poles(k))
    regime = KernelRegime.for_k(k)
    C_inv = R0 * math.exp(-F_closed(w0, regime))
    return ChielliniParams(k, C_inv, w0, float(ic.x0), 0.0, regime, _sign(f0 * q0))


def _fit_k_zero(f, A, ic):
    v0 = 1.0 / ic.xdot0
    Fint = antiderivative(f)
    K1 = float(Fint(ic.x0)) - _phi(v0, A)
    return KZeroParams(float(A), K1, v0, float(ic.x0))


# ---------------------------------------------------------------- inversion


class _Inverter:
    """Root of ``(g/f)(x) = T`` inside one monotone cell."""

    def __init__(self, sys: LienardSystem):
        self.sys = sys
        self.R = sys.ratio_function()
        self.cells = sys.cells()
        folds = set(sys.f_sign_changes())
        self.fold_edges = [(lo in folds, hi in folds) for lo, hi in self.cells]
        self.fsign = []
        for lo, hi in self.cells:
            xm = _interior_point(lo, hi)
            self.fsign.append(_sign(float(sys.f(xm))))

    def __call__(self, T, cell) -> float:
        lo, hi = self.cells[cell]
        if self.sys.inverter is not None:
            x = self.sys.inverter(T, lo, hi)
            if x is not None:
                return x
        return self._root(T, lo, hi)

    def _root(self, T, lo, hi):
        h = lambda x: float(self.R(x)) - T  # noqa: E731
        a, b = _finite_bracket(h, lo, hi)
        try:
            return bracketed_root(h, a, b, tol=0.0)
        except BracketError:
            # T sits a rounding error beyond the extremum of g/f at a fold
            ha, hb = abs(h(a)), abs(h(b))
            best = a if ha <= hb else b
            if min(ha, hb) <= 1e-12 * max(1.0, abs(T)):
                return best
            raise


def _interior_point(lo, hi):
    if math.isinf(lo) and math.isinf(hi):
        return 0.0
    if math.isinf(lo):
        return hi - 1.0
    if math.isinf(hi):
        return lo + 1.0
    return 0.5 * (lo + hi)


def _finite_bracket(h, lo, hi):
    """Replace infinite cell ends by points where monotone ``h`` has changed sign."""
    if math.isfinite(lo) and math.isfinite(hi):
        return lo, hi
    if math.isfinite(lo) or math.isfinite(hi):
        base, s = (lo, 1.0) if math.isfinite(lo) else (hi, -1.0)
        h0 = h(base)
        inner, step = base, 1.0
        while step < 1e300:
            outer = base + s * step * max(1.0, abs(base))
            if h0 == 0.0 or (h(outer) > 0) != (h0 > 0):
                return (inner, outer) if s > 0 else (outer, inner)
            inner, step = outer, 2.0 * step
        raise BracketError("no sign change on the unbounded cell")
    h0 = h(0.0)
    step = 1.0
    while step < 1e300:
        if h0 == 0.0:
            return 0.0, 0.0
        if (h(step) > 0) != (h0 > 0):
            return 0.0, step
        if (h(-step) > 0) != (h0 > 0):
            return -step, 0.0
        step *= 2.0
    raise BracketError("no sign change on the real line")


# ---------------------------------------------------------- single branch


def _w_grid(w_a, w_b, n, poles):
    """Uniform grid, switched to geometric spacing near a kernel pole."""
    span = w_b - w_a
    left = [p for p in poles if p <= w_a]
    right = [p for p in poles if p >= w_b]
    d_a = w_a - max(left) if left else math.inf
    d_b = min(right) - w_b if right else math.inf
    near_a, near_b = d_a < 0.25 * span, d_b < 0.25 * span
    if not (near_a or near_b):
        return np.linspace(w_a, w_b, n)
    if near_a and near_b:
        m = 0.5 * (w_a + w_b)
        n1 = n // 2
        return np.concatenate([_w_grid(w_a, m, n1 + 1, poles)[:-1], _w_grid(m, w_b, n - n1, poles)])
    if near_a:
        p = max(left)
        return p + np.geomspace(d_a, w_b - p, n)
    p = min(right)
    return (p - np.geomspace(d_b, p - w_a, n))[::-1]


def solve_parametric(sys: LienardSystem, params: ChielliniParams, w_range, n_samples: int = DEFAULT_SAMPLES):
    """Sample one branch of the exact solution over ``w`` in ``w_range``.

    The branch (monotone cell of ``g/f``) is the one containing ``x0``; the
    sample at ``w0`` is ``(w0, x0, 0, x'0)`` exactly and time is accumulated
    outward from it. Sampling stops at a fold, where the branch ends; the
    returned solution is then marked ``truncated``.
    """
    if isinstance(params, KZeroParams):
        raise TypeError("k=0 parameters: use solve_k_zero")
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    w_a, w_b = sorted(float(v) for v in w_range)
    if not w_a < w_b:
        raise ValueError("empty w_range")
    w0, k = params.w0, params.k
    lo, hi = min(w_a, w0), max(w_b, w0)
    bad = [p for p in kernel_poles(k) if lo <= p <= hi]
    if bad:
        raise PoleError(f"w range [{lo}, {hi}] (including w0) contains kernel pole(s) {bad}", bad)

    inv = _Inverter(sys)
    cell = sys.cell_index(params.x0)
    grid = _w_grid(w_a, w_b, n_samples, kernel_poles(k))
    if w_a <= w0 <= w_b and w0 not in grid:
        grid = np.sort(np.append(grid, w0))
    f, R = sys.f, inv.R

    def x_of(w):
        return params.x0 if w == w0 else inv(params.target(w), cell)

    def dt_dw(w):
        return 1.0 / (float(f(x_of(w))) * quadratic_q(w, k))

    i0 = int(np.searchsorted(grid, w0))
    right, left = [], []
    reason = None
    for side, idx in ((right, range(i0, len(grid))), (left, range(i0 - 1, -1, -1))):
        w_prev, t_prev = w0, params.t0
        for i in idx:
            w = float(grid[i])
            try:
                x = x_of(w)
                t = t_prev + adaptive_quadrature(dt_dw, w_prev, w, tol=_STEP_TOL)
            except (BracketError, DomainError, LienardError) as exc:
                reason = f"branch ends near w={w:.17g} (fold of g/f or domain edge): {exc}"
                break
            side.append((w, x, t))
            w_prev, t_prev = w, t
    rows = left[::-1] + right
    if len(rows) < 2:
        raise BracketError(f"fewer than two valid samples on the branch of x0: {reason}")
    w = np.array([r[0] for r in rows])
    x = np.array([r[1] for r in rows])
    t = np.array([r[2] for r in rows])
    Rx = np.array([float(R(v)) for v in x])
    fx = np.array([float(f(v)) for v in x])
    xdot = Rx / w
    xddot = -fx * Rx * (1.0 + 1.0 / w)
    return ParametricSolution(w, x, t, xdot, np.full(len(w), cell), (float(w[0]), float(w[-1])), sys,
                              params, params.time_direction, reason, xddot)


# ------------------------------------------------------- full trajectory


@dataclass(frozen=True)
class _ArcPlan:
    breaks: Tuple[float, ...]   # u at arc start, turning point (0) if crossed, arc end
    cell: int
    start_fold: bool
    end: str                    # "fold" | "edge" | "qpole" | "wpole"
    x_a: float
    x_b: Optional[float] = None
    next_cell: Optional[int] = None


def _p(u, k):
    return 1.0 + u + k * u * u


def _u_poles(k):
    """Zeros of ``1 + u + k u^2`` (``w^2 + w + k`` mapped to ``u = 1/w``)."""
    return [1.0 / p for p in kernel_poles(k) if p != 0.0]


def _level_crossing(Tu, p, q, level, s):
    """``u`` in the phase ``(p, q)`` where ``T(u) = level``, if any (T monotone there)."""
    h = lambda u: Tu(u) - level  # noqa: E731
    hp = h(p)
    prev = p
    if math.isfinite(q):
        probes = [q] if q == 0.0 else [q - (q - p) * 2.0 ** -j for j in range(1, 61)]
    else:
        base = max(1.0, abs(p))
        probes = [p + s * base * 2.0 ** j for j in range(0, 41)]
    for cur in probes:
        hc = h(cur)
        if hc == 0.0:
            return cur
        if (hc > 0) != (hp > 0):
            return bracketed_root(h, min(prev, cur), max(prev, cur), tol=0.0)
        prev = cur
    return None


def _plan_arc(inv: _Inverter, params: ChielliniParams, u_a, x_a, cell, start_fold):
    k = params.k
    Tu = params.target_u
    s_u = -inv.fsign[cell] * _sign(_p(u_a, k))
    ahead = [r for r in _u_poles(k) if (r - u_a) * s_u > 0]
    u_lim = min(ahead, key=lambda r: abs(r - u_a)) if ahead else s_u * math.inf
    bounds = [u_a]
    if (0.0 - u_a) * s_u > 0 and (u_lim - 0.0) * s_u > 0:
        bounds.append(0.0)
    bounds.append(u_lim)
    t_sign = _sign(params.C_inv)
    lo, hi = inv.cells[cell]
    lo_fold, hi_fold = inv.fold_edges[cell]
    for i, (p, q) in enumerate(zip(bounds[:-1], bounds[1:])):
        xdir = t_sign * (_sign(q) if p == 0.0 else _sign(p))
        edge, is_fold = (hi, hi_fold) if xdir > 0 else (lo, lo_fold)
        if math.isinf(edge):
            continue
        try:
            level = float(inv.R(edge))
        except LienardError:
            continue
        uc = _level_crossing(Tu, p, q, level, s_u)
        if uc is not None:
            brk = tuple(bounds[: i + 1]) + (uc,)
            if is_fold:
                return _ArcPlan(brk, cell, start_fold, "fold", x_a, edge, cell + (1 if xdir > 0 else -1))
            return _ArcPlan(brk, cell, start_fold, "edge", x_a, edge)
    return _ArcPlan(tuple(bounds), cell, start_fold, "wpole" if math.isinf(u_lim) else "qpole", x_a)


class _Trajectory:
    """Arc-by-arc sampler.

    Each phase of an arc (``u`` between the arc ends and the turning point)
    is sampled in ``x`` where it touches a fold, since ``dt/dx = 1/x'`` is
    regular there while ``x(u)`` is ill-conditioned, and in ``u`` near
    turning points where ``dt/du`` is regular. Pole-ended phases finish
    with geometric steps in ``u``.
    """

    def __init__(self, sys, params, t_end, n_piece):
        self.sys, self.params, self.t_end = sys, params, t_end
        self.inv = _Inverter(sys)
        self.n = n_piece
        self.rows = []          # (u, x, t, cell)
        self.reason = None
        self.arcs = 0

    def x_of(self, u, cell):
        return self.inv(self.params.target_u(u), cell)

    def u_of(self, x, u_lo, u_hi):
        Tu = self.params.target_u
        level = float(self.inv.R(x))
        h = lambda u: Tu(u) - level  # noqa: E731
        a, b = min(u_lo, u_hi), max(u_lo, u_hi)
        try:
            return bracketed_root(h, a, b, tol=0.0)
        except BracketError:
            ha, hb = abs(h(a)), abs(h(b))
            if min(ha, hb) <= 1e-12 * max(1.0, abs(level)):
                return a if ha <= hb else b
            raise

    def dt_du(self, u, cell):
        return -1.0 / (float(self.sys.f(self.x_of(u, cell))) * _p(u, self.params.k))

    def _emit(self, u, x, t, cell):
        self.rows.append((u, x, t, cell))
        return t >= self.t_end

    def piece_u(self, cell, u_a, u_b, x_b, t):
        grid = np.linspace(u_a, u_b, self.n + 1)
        for u0, u1 in zip(grid[:-1], grid[1:]):
            t += adaptive_quadrature(lambda v: self.dt_du(v, cell), float(u0), float(u1), tol=_STEP_TOL)
            u1 = u_b if u1 == grid[-1] else float(u1)
            x1 = x_b if (u1 == u_b and x_b is not None) else self.x_of(u1, cell)
            if self._emit(u1, x1, t, cell):
                return t, True
        return t, False

    def piece_x(self, cell, x_a, x_b, u_a, u_b, t):
        def dt_dx(x):
            return 1.0 / (float(self.inv.R(x)) * self.u_of(x, u_a, u_b))

        grid = np.linspace(x_a, x_b, self.n + 1)
        for x0, x1 in zip(grid[:-1], grid[1:]):
            t += adaptive_quadrature(dt_dx, float(x0), float(x1), tol=_STEP_TOL)
            last = x1 == grid[-1]
            x1 = x_b if last else float(x1)
            u1 = u_b if last else self.u_of(x1, u_a, u_b)
            if self._emit(u1, x1, t, cell):
                return t, True
        return t, False

    def piece_geometric(self, cell, u_m, u_b, kind, t):
        ratio = 2.0 ** 0.125
        u_prev, j = u_m, 0
        while True:
            j += 1
            if kind == "qpole":
                u = u_b - (u_b - u_m) * ratio ** -j
                if abs(u - u_b) <= 1e-13 * max(1.0, abs(u_b)):
                    self.reason = f"asymptotic approach to the kernel pole w={1.0 / u_b:.17g} (t -> inf)"
                    return t, True
            else:
                u = u_m * ratio ** j
                if abs(u) > 1e10 * max(1.0, abs(u_m)):
                    self.reason = ("reaches the kernel pole w=0 (x crosses a zero of g) in finite time; "
                                   "continuation through kernel poles is not supported")
                    return t, True
            t += adaptive_quadrature(lambda v: self.dt_du(v, cell), u_prev, u, tol=_STEP_TOL)
            if self._emit(u, self.x_of(u, cell), t, cell):
                return t, True
            u_prev = u

    def phase(self, plan, p, q, x_p, fold_p, fold_q, pole_q, t):
        """Sample the phase ``u: p -> q``; ``x_p`` is known, ``x`` at ``q`` is a fold edge if ``fold_q``."""
        cell = plan.cell
        x_q = plan.x_b if fold_q else None
        if pole_q:
            s = _sign(q - p) if math.isfinite(q) else _sign(q)
            u_m = 0.5 * (p + q) if math.isfinite(q) else p + s * max(1.0, abs(p))
            x_m = self.x_of(u_m, cell)
            if fold_p:
                t, done = self.piece_x(cell, x_p, x_m, p, u_m, t)
            else:
                t, done = self.piece_u(cell, p, u_m, x_m, t)
            if done:
                return t, True
            return self.piece_geometric(cell, u_m, q, plan.end, t)
        turn_p, turn_q = p == 0.0, q == 0.0
        if (fold_p and turn_q) or (turn_p and fold_q):
            u_m = 0.5 * (p + q)
            x_m = self.x_of(u_m, cell)
            if fold_p:
                t, done = self.piece_x(cell, x_p, x_m, p, u_m, t)
                return (t, True) if done else self.piece_u(cell, u_m, q, None, t)
            t, done = self.piece_u(cell, p, u_m, x_m, t)
            return (t, True) if done else self.piece_x(cell, x_m, x_q, u_m, q, t)
        if fold_p or fold_q:
            if x_q is None:
                x_q = self.x_of(q, cell)
            return self.piece_x(cell, x_p, x_q, p, q, t)
        return self.piece_u(cell, p, q, x_q, t)

    def run(self, max_arcs):
        p = self.params
        u, x, cell, t = 1.0 / p.w0, p.x0, self.sys.cell_index(p.x0), p.t0
        self._emit(u, x, t, cell)
        start_fold = False
        for _ in range(max_arcs):
            plan = _plan_arc(self.inv, p, u, x, cell, start_fold)
            self.arcs += 1
            brk = plan.breaks
            n_ph = len(brk) - 1
            x_p = x
            for i in range(n_ph):
                a, b = brk[i], brk[i + 1]
                last = i == n_ph - 1
                fold_q = last and plan.end in ("fold", "edge")
                pole_q = last and plan.end in ("qpole", "wpole")
                t, done = self.phase(plan, a, b, x_p, i == 0 and start_fold, fold_q, pole_q, t)
                if done:
                    return
                x_p = self.rows[-1][1]
            if plan.end == "edge":
                self.reason = f"trajectory leaves the working domain at x={plan.x_b:.17g}"
                return
            u, x, cell, start_fold = brk[-1], plan.x_b, plan.next_cell, True
        self.reason = f"stopped after max_arcs={max_arcs} arcs"


def solve_trajectory(sys: LienardSystem, params: ChielliniParams, t_end, samples_per_piece: int = 128,
                     max_arcs: int = 10000) -> ParametricSolution:
    """Follow the exact solution forward from ``t0`` to ``t_end``.

    The motion is split into arcs between folds of the inversion
    (``f(x) = 0``). Inside an arc ``u = 1/w`` is monotone, ``x(u)`` is the
    root of ``g/f = C^{-1} e^{F(1/u)}`` in one monotone cell of ``g/f``.
    Time is integrated as ``dt/du`` near turning points and as
    ``dt/dx = 1/x'`` near folds, where ``u - u_fold`` goes like
    ``(x - x_fold)^2`` and ``x(u)`` loses half its digits.

    Sampling stops early (``truncated`` is set) when the trajectory runs
    into the kernel pole ``w = 0`` (a zero of ``g``), approaches a root of
    ``w^2 + w + k`` asymptotically, or leaves the working domain.
    """
    if isinstance(params, KZeroParams):
        raise TypeError("k=0 parameters: use solve_k_zero")
    if samples_per_piece < 2:
        raise ValueError("samples_per_piece must be at least 2")
    t_end = float(t_end)
    if not t_end > params.t0:
        raise ValueError("t_end must exceed t0")
    run = _Trajectory(sys, params, t_end, samples_per_piece)
    run.run(max_arcs)
    u = np.array([r[0] for r in run.rows])
    x = np.array([r[1] for r in run.rows])
    t = np.array([r[2] for r in run.rows])
    cells = np.array([r[3] for r in run.rows], dtype=int)
    R, f = run.inv.R, sys.f
    Rx = np.array([float(R(v)) for v in x])
    fx = np.array([float(f(v)) for v in x])
    with np.errstate(divide="ignore"):
        w = np.where(u == 0.0, np.copysign(np.inf, u), 1.0 / np.where(u == 0.0, 1.0, u))
    xdot = Rx * u
    xddot = -fx * Rx * (1.0 + u)
    return ParametricSolution(w, x, t, xdot, cells, (float(w[0]), float(w[-1])), sys, params, 1,
                              run.reason, xddot, {"arcs": run.arcs})


# ---------------------------------------------------------------- k = 0


def _phi(v, A):
    """``A ln|1/v + A| - 1/v``."""
    if A == 0.0:
        return -1.0 / v
    return A * math.log(abs(1.0 / v + A)) - 1.0 / v


def _v_grid(v_a, v_b, n):
    if v_a * v_b > 0 and max(abs(v_a), abs(v_b)) > 10.0 * min(abs(v_a), abs(v_b)):
        return np.sign(v_a) * np.geomspace(abs(v_a), abs(v_b), n)
    return np.linspace(v_a, v_b, n)


def solve_k_zero(f: FunctionSpec, A, ic: InitialConditions, v_range, n_samples: int = DEFAULT_SAMPLES):
    """Exact solution of ``x'' + f(x) x' + A f(x) = 0`` parametrised by ``v = 1/x'``.

    ``x(v)`` solves ``int f dx = A ln|1/v + A| - 1/v + K1`` (bracketed
    root, continued from the previous sample inside the monotone cell of
    ``int f``) and ``t - t0 = int dv / (f(x(v)) v (1 + A v))``.
    """
    A = float(A)
    v_a, v_b = (float(v) for v in v_range)
    v0 = 1.0 / ic.xdot0
    lo_v, hi_v = min(v_a, v_b, v0), max(v_a, v_b, v0)
    poles = [0.0] + ([-1.0 / A] if A != 0.0 else [])
    bad = [p for p in poles if lo_v <= p <= hi_v]
    if bad:
        raise PoleError(f"v range [{lo_v}, {hi_v}] contains pole(s) {bad} of dt/dv", bad)
    if float(f(ic.x0)) == 0.0:
        raise SingularCoefficientError(f"f(x0) = 0 at x0={ic.x0}", ic.x0)
    params = _fit_k_zero(f, A, ic)
    sys = LienardSystem(f, _times(f, A), k=0.0, name="k0")
    cell = sys.cell_index(ic.x0)
    c_lo, c_hi = sys.cells()[cell]
    Fint = antiderivative(f)

    def x_of(v, seed):
        if v == v0:
            return ic.x0
        level = _phi(v, A) + params.K1
        h = lambda x: float(Fint(x)) - level  # noqa: E731
        a, b = _expand_around(h, seed, c_lo, c_hi)
        return bracketed_root(h, a, b, tol=0.0)

    grid = _v_grid(min(v_a, v_b), max(v_a, v_b), n_samples)
    if lo_v <= v0 <= hi_v and v0 not in grid:
        grid = np.sort(np.append(grid, v0))
    i0 = int(np.searchsorted(grid, v0))
    rows = {}
    reason = None
    for idx in (range(i0, len(grid)), range(i0 - 1, -1, -1)):
        v_prev, x_prev, t_prev = v0, ic.x0, params.t0
        for i in idx:
            v = float(grid[i])
            try:
                x = x_of(v, x_prev)
                seeds = {"x": x_prev}

                def dt_dv(s, _seeds=seeds):
                    xs = x_of(s, _seeds["x"])
                    _seeds["x"] = xs
                    return 1.0 / (float(f(xs)) * s * (1.0 + A * s))

                t = t_prev + adaptive_quadrature(dt_dv, v_prev, v, tol=_STEP_TOL)
            except LienardError as exc:
                reason = f"branch ends near v={v:.17g}: {exc}"
                break
            rows[i] = (v, x, t)
            v_prev, x_prev, t_prev = v, x, t
    keys = sorted(rows)
    v = np.array([rows[i][0] for i in keys])
    x = np.array([rows[i][1] for i in keys])
    t = np.array([rows[i][2] for i in keys])
    xdot = 1.0 / v
    fx = np.array([float(f(s)) for s in x])
    xddot = -fx * (xdot + A)
    return ParametricSolution(v, x, t, xdot, np.full(len(v), cell), (float(v[0]), float(v[-1])), sys,
                              params, _sign(float(f(ic.x0)) * v0 * (1.0 + A * v0)), reason, xddot,
                              {"parameter": "v"})


def _times(f, A):
    if isinstance(f, BlackBox):
        return BlackBox(lambda x: A * f(x), f.domain, name="A f")
    return f * A


def _expand_around(h, seed, lo, hi):
    """Bracket the single sign change of monotone ``h`` in ``(lo, hi)`` starting at ``seed``."""
    hs = h(seed)
    if hs == 0.0:
        return seed, seed
    step = 1e-3 * max(1.0, abs(seed))
    for _ in range(2000):
        a = max(seed - step, lo) if math.isfinite(lo) else seed - step
        b = min(seed + step, hi) if math.isfinite(hi) else seed + step
        if (h(a) > 0) != (hs > 0):
            return a, seed
        if (h(b) > 0) != (hs > 0):
            return seed, b
        step *= 2.0
        if step > 1e300:
            break
    raise BracketError(f"no root of the implicit relation in the cell ({lo}, {hi})")


# ---------------------------------------------------------- time series


def _hermite_slopes(t, y, d):
    """Fritsch-Carlson limiting of the supplied slopes on monotone segments.

    Segments whose end slopes disagree in sign contain an extremum
    (turning point) and keep the exact derivative data.
    """
    d = d.copy()
    delta = np.diff(y) / np.diff(t)
    for i, s in enumerate(delta):
        if s == 0.0:
            continue
        a, b = d[i] / s, d[i + 1] / s
        if a < 0 or b < 0:
            continue
        r = a * a + b * b
        if r > 9.0:
            tau = 3.0 / math.sqrt(r)
            d[i] = tau * a * s
            d[i + 1] = tau * b * s
    return d


def _hermite(t, y, d, tq):
    idx = np.clip(np.searchsorted(t, tq, side="right") - 1, 0, len(t) - 2)
    h = t[idx + 1] - t[idx]
    s = (tq - t[idx]) / h
    s2, s3 = s * s, s * s * s
    h00 = 2 * s3 - 3 * s2 + 1
    h10 = s3 - 2 * s2 + s
    h01 = -2 * s3 + 3 * s2
    h11 = s3 - s2
    out = h00 * y[idx] + h10 * h * d[idx] + h01 * y[idx + 1] + h11 * h * d[idx + 1]
    exact = tq == t[idx]
    out[exact] = y[idx][exact]
    return out


def emit_time_series(sol: ParametricSolution, t_grid: Sequence[float]) -> np.ndarray:
    """Resample ``sol`` on ``t_grid``; returns rows ``(t, x, xdot)``.

    Piecewise cubic Hermite interpolation in ``t`` using the exact
    derivatives ``x'`` and ``x'' = -f x' - g`` at the samples, with
    Fritsch-Carlson limiting on monotone segments.
    """
    tq = np.asarray(t_grid, dtype=float).ravel()
    order = np.argsort(sol.t, kind="stable")
    t = sol.t[order]
    if np.any(np.diff(t) <= 0.0):
        raise TimeRangeError("sample times are not strictly monotone")
    lo, hi = t[0], t[-1]
    slack = 1e-12 * max(1.0, abs(lo), abs(hi))
    if tq.size and (tq.min() < lo - slack or tq.max() > hi + slack):
        raise TimeRangeError(f"requested t in [{tq.min()}, {tq.max()}] outside solution span [{lo}, {hi}]")
    tq = np.clip(tq, lo, hi)
    x, xd = sol.x[order], sol.xdot[order]
    if sol.xddot is not None:
        xdd = sol.xddot[order]
    else:
        xdd = np.gradient(xd, t)
    xi = _hermite(t, x, _hermite_slopes(t, x, xd), tq)
    vi = _hermite(t, xd, _hermite_slopes(t, xd, xdd), tq)
    return np.column_stack([tq, xi, vi])
