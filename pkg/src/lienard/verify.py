"""Independent checks of exact solutions.

The oracle is a direct integration of ``x' = y, y' = -f(x) y - g(x)`` by
the embedded 8(5,3) Dormand-Prince pair (``scipy.integrate.solve_ivp``,
method ``DOP853``). It shares nothing with the exact pipeline beyond the
coefficient functions themselves.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from ._numerics import bracketed_root
from .exceptions import BracketError, IntegrationError, WindowError
from .funcmodel import antiderivative
from .integrability import LienardSystem
from .kernel import F_closed, kernel_poles, w_domain
from .solver import ChielliniParams, InitialConditions, KZeroParams, _phi

__all__ = [
    "ReferenceTrajectory",
    "ComparisonReport",
    "integrate_reference",
    "compare",
    "abel_residual",
    "relation_residual",
    "velocity_residual",
]


@dataclass(frozen=True)
class ReferenceTrajectory:
    """Accepted RK steps ``(t, x, xdot)`` plus the method's dense interpolant."""

    t: np.ndarray
    x: np.ndarray
    xdot: np.ndarray
    method: str
    order: int
    tolerance: float
    n_steps: int
    n_fev: int
    _dense: object = field(repr=False, compare=False, default=None)

    @property
    def samples(self):
        return list(zip(self.t.tolist(), self.x.tolist(), self.xdot.tolist()))

    @property
    def t_span(self):
        return float(self.t[0]), float(self.t[-1])

    def evaluate(self, t):
        y = self._dense(np.asarray(t, dtype=float))
        return y[0], y[1]


def integrate_reference(sys: LienardSystem, ic: InitialConditions, t_span, tol: float = 1e-12) -> ReferenceTrajectory:
    """Integrate the Lienard equation as a first-order system.

    ``tol`` is used as both the relative and absolute local error target
    of every accepted step; it must lie in ``[1e-13, 1e-3]``.
    """
    if not 1e-13 <= tol <= 1e-3:
        raise ValueError(f"tol={tol} outside [1e-13, 1e-3]")
    t0, t1 = (float(v) for v in t_span)
    f, g = sys.f, sys.g

    def rhs(t, y):
        x, v = y
        return [v, -float(f(x)) * v - float(g(x))]

    try:
        res = solve_ivp(rhs, (t0, t1), [ic.x0, ic.xdot0], method="DOP853", rtol=tol, atol=tol,
                        dense_output=True)
    except (ValueError, ArithmeticError) as exc:
        raise IntegrationError(f"right-hand side failed: {exc}") from exc
    if res.status != 0 or not np.all(np.isfinite(res.y)):
        raise IntegrationError(f"integration failed: {res.message}", float(res.t[-1]), tuple(res.y[:, -1]))
    return ReferenceTrajectory(res.t, res.y[0], res.y[1], "DOP853", 8, tol, len(res.t) - 1, res.nfev, res.sol)


@dataclass(frozen=True)
class ComparisonReport:
    max_abs_x_error: float
    max_abs_xdot_error: float
    t_window: Tuple[float, float]
    table: np.ndarray        # columns t, x_exact, x_ref, xdot_exact, xdot_ref
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_abs_x_error <= self.tolerance

    def summary(self) -> str:
        return (f"{'PASS' if self.passed else 'FAIL'} max|dx|={self.max_abs_x_error:.3e} "
                f"max|dxdot|={self.max_abs_xdot_error:.3e} tol={self.tolerance:.1e} "
                f"t=[{self.t_window[0]:.6g}, {self.t_window[1]:.6g}]")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "x_exact", "x_ref", "dx", "xdot_exact", "xdot_ref", "dxdot"])
        for t, xe, xr, ve, vr in self.table:
            w.writerow([f"{v:.17g}" for v in (t, xe, xr, xe - xr, ve, vr, ve - vr)])
        return buf.getvalue()


def compare(sol, ref, tol: float = 1e-6, n_points: int = 1001, t_window=None) -> ComparisonReport:
    """Compare two trajectories on a common uniform grid over their shared window.

    Both arguments only need ``t_span`` and ``evaluate(t) -> (x, xdot)``.
    """
    lo = max(sol.t_span[0], ref.t_span[0])
    hi = min(sol.t_span[1], ref.t_span[1])
    if t_window is not None:
        lo, hi = max(lo, t_window[0]), min(hi, t_window[1])
    if not lo < hi:
        raise WindowError(f"no common time window: {sol.t_span} vs {ref.t_span}")
    t = np.linspace(lo, hi, n_points)
    xs, vs = sol.evaluate(t)
    xr, vr = ref.evaluate(t)
    table = np.column_stack([t, xs, xr, vs, vr])
    return ComparisonReport(float(np.max(np.abs(xs - xr))), float(np.max(np.abs(vs - vr))), (lo, hi), table, tol)


def relation_residual(sys: LienardSystem, params: ChielliniParams, w, x) -> float:
    """Max relative violation of ``g/f = C^{-1} e^{F(w)}`` over sample pairs."""
    R = sys.ratio_function()
    worst = 0.0
    for wi, xi in zip(np.ravel(w), np.ravel(x)):
        target = params.target(float(wi))
        worst = max(worst, abs(float(R(float(xi))) - target) / abs(target))
    return worst


def velocity_residual(sys: LienardSystem, w, x, xdot) -> float:
    """Max relative violation of ``x' w = g/f`` (finite ``w`` only)."""
    R = sys.ratio_function()
    worst = 0.0
    for wi, xi, vi in zip(np.ravel(w), np.ravel(x), np.ravel(xdot)):
        if not math.isfinite(wi):
            continue
        r = float(R(float(xi)))
        worst = max(worst, abs(vi * wi - r) / max(abs(r), 1e-300))
    return worst


def _w_of_x(params: ChielliniParams, R, x):
    """Invert ``C^{-1} e^{F(w)} = R(x)`` on the pole-free ``w`` component of ``w0``."""
    dom = w_domain(params.w0, params.k)
    c = params.c_inv_for(1 if params.w0 > 0 else -1)
    level = math.log(float(R(x)) / c)
    h = lambda w: F_closed(w, params.regime) - level  # noqa: E731
    lo, hi = dom.w_lo, dom.w_hi
    # walk from w0 toward each end of the component until F crosses the level
    for end in (lo, hi):
        prev = params.w0
        for j in range(1, 200):
            if math.isfinite(end):
                cur = end - (end - params.w0) * 2.0 ** -j
            else:
                cur = params.w0 + math.copysign(2.0 ** j, end)
            if (h(cur) > 0) != (h(prev) > 0):
                return bracketed_root(h, min(prev, cur), max(prev, cur), tol=0.0)
            prev = cur
    if h(params.w0) == 0.0:
        return params.w0
    raise BracketError(f"g/f(x={x}) is outside the range of C^-1 e^F on the w-branch of w0")


def _v_of_x_k0(params: KZeroParams, Fint, x):
    A = params.A
    level = float(Fint(x)) - params.K1
    h = lambda v: _phi(v, A) - level  # noqa: E731
    poles = sorted([0.0] + ([-1.0 / A] if A != 0.0 else []))
    lo = max([p for p in poles if p < params.v0], default=-math.inf)
    hi = min([p for p in poles if p > params.v0], default=math.inf)
    for end in (lo, hi):
        prev = params.v0
        for j in range(1, 200):
            cur = end - (end - params.v0) * 2.0 ** -j if math.isfinite(end) else params.v0 + math.copysign(2.0 ** j, end)
            if (h(cur) > 0) != (h(prev) > 0):
                return bracketed_root(h, min(prev, cur), max(prev, cur), tol=0.0)
            prev = cur
    raise BracketError(f"no v on the branch of v0 satisfies the implicit relation at x={x}")


def abel_residual(sys: LienardSystem, params, x_grid) -> float:
    """Max of ``|dv/dx - f v^2 - g v^3|`` for the exact ``v(x) = 1/x'``.

    ``v`` is rebuilt on ``x_grid`` from the defining relation
    (``v = w / (g/f)``, or the implicit k=0 law) and differentiated by
    central differences, so the residual is ``O(h^2)`` for a uniform grid.
    """
    xs = np.asarray(x_grid, dtype=float)
    if xs.size < 3:
        raise ValueError("x_grid needs at least three points")
    if isinstance(params, KZeroParams):
        Fint = antiderivative(sys.f)
        v = np.array([_v_of_x_k0(params, Fint, x) for x in xs])
    else:
        R = sys.ratio_function()
        v = np.array([_w_of_x(params, R, x) / float(R(x)) for x in xs])
    dv = (v[2:] - v[:-2]) / (xs[2:] - xs[:-2])
    xm, vm = xs[1:-1], v[1:-1]
    fm = np.array([float(sys.f(x)) for x in xm])
    gm = np.array([float(sys.g(x)) for x in xm])
    return float(np.max(np.abs(dv - fm * vm ** 2 - gm * vm ** 3)))
