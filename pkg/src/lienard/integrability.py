"""Integrability conditions for Lienard and Abel equations.

``x'' + f(x) x' + g(x) = 0`` becomes, with ``v = 1/x'``, the Abel equation
``dv/dx = f v^2 + g v^3``. It is exactly integrable when
``d/dx (g/f) = k f`` for a constant ``k``; equivalently
``g = f (C1 + k int f)`` or ``f = +-g / sqrt(C2 + 2k int g)``.

The checkers *estimate* ``k`` (median of the pointwise ratio over a grid)
and report the residual, so they double as a ``k`` detector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Tuple, Union

import numpy as np

from ._numerics import bracketed_root, central_difference
from .exceptions import BracketError, DomainError, SingularCoefficientError
from .funcmodel import (
    BlackBox,
    FunctionSpec,
    Polynomial,
    antiderivative,
    as_fraction,
    derivative,
)

__all__ = [
    "LienardSystem",
    "ChielliniCertificate",
    "GeneralAbel",
    "StandardAbelPair",
    "Lemma2Result",
    "check_chiellini",
    "construct_g_from_f",
    "construct_f_from_g",
    "check_lemma2",
    "reduce_levinson_smith",
    "POLY_TOL",
    "BLACKBOX_TOL",
]

POLY_TOL = 1e-9
BLACKBOX_TOL = 1e-6
DEFAULT_WORKING_INTERVAL = (-2.0, 2.0)


def _is_poly(*specs):
    return all(isinstance(s, Polynomial) for s in specs)


def _is_zero(spec):
    return isinstance(spec, Polynomial) and spec.is_zero()


@dataclass(frozen=True)
class LienardSystem:
    """``x'' + f(x) x' + g(x) = 0`` on the working interval ``domain``.

    ``ratio`` may carry ``g/f`` in a form that stays finite where ``f``
    vanishes; it is derived by exact division when ``f`` divides ``g``.
    ``inverter(T, lo, hi)`` is an optional closed-form solver of
    ``ratio(x) = T`` on the monotone cell ``(lo, hi)``; it returns ``None``
    where the closed form does not apply.
    """

    f: FunctionSpec
    g: FunctionSpec
    domain: Tuple[float, float] = DEFAULT_WORKING_INTERVAL
    k: Optional[float] = None
    ratio: Optional[FunctionSpec] = None
    name: str = ""
    inverter: Optional[Callable] = field(default=None, compare=False, repr=False)
    constants: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        lo, hi = self.domain
        if not lo < hi:
            raise ValueError(f"empty working interval {self.domain}")

    def ratio_function(self) -> FunctionSpec:
        """``g/f`` as a function spec (exact polynomial when ``f | g``)."""
        if self.ratio is not None:
            return self.ratio
        if _is_poly(self.f, self.g) and not self.f.is_zero():
            q, r = divmod(self.g, self.f)
            if r.is_zero():
                return q
        f, g = self.f, self.g

        def ratio(x):
            fx = f(x)
            if fx == 0.0:
                raise SingularCoefficientError(f"f vanishes at x={x}; g/f undefined", x)
            return g(x) / fx

        return BlackBox(ratio, self.domain if isinstance(f, BlackBox) else (-math.inf, math.inf),
                        name="g/f")

    def f_sign_changes(self) -> Tuple[float, ...]:
        """Points where ``f`` changes sign: the fold points of the inversion ``x(w)``."""
        f = self.f
        if isinstance(f, Polynomial):
            return tuple(f.real_roots(odd_only=True))
        if f.zeros is not None:
            return tuple(sorted(f.zeros))
        lo, hi = self.domain
        xs = np.linspace(lo, hi, 2049)
        vals = [f(x) for x in xs]
        zeros = []
        for a, b, fa, fb in zip(xs[:-1], xs[1:], vals[:-1], vals[1:]):
            if fa == 0.0:
                zeros.append(float(a))
            elif fa * fb < 0:
                zeros.append(bracketed_root(f, a, b, tol=0.0))
        return tuple(zeros)

    def cells(self):
        """Maximal intervals on which ``g/f`` is strictly monotone."""
        if isinstance(self.f, Polynomial):
            edges = [-math.inf, *self.f_sign_changes(), math.inf]
        else:
            lo, hi = self.f.domain if self.f.domain != (-math.inf, math.inf) else (-math.inf, math.inf)
            edges = [lo, *[z for z in self.f_sign_changes() if lo < z < hi], hi]
        return list(zip(edges[:-1], edges[1:]))

    def cell_index(self, x) -> int:
        for i, (lo, hi) in enumerate(self.cells()):
            if lo < x < hi:
                return i
        raise SingularCoefficientError(f"x={x} sits on a zero of f (cell boundary)", x)


@dataclass(frozen=True)
class ChielliniCertificate:
    """Outcome of :func:`check_chiellini`.

    ``holds`` implies ``residual <= tolerance``. ``k_exact`` is set when the
    exact polynomial path decided the question.
    """

    holds: bool
    k: float
    residual: float
    grid: Tuple[float, ...]
    tolerance: float
    exact: bool = False
    k_exact: Optional[Fraction] = None
    degenerate: bool = False
    note: str = ""

    def __str__(self):
        s = f"holds={'true' if self.holds else 'false'} k={self.k:.17g} residual={self.residual:.3g}"
        if self.note:
            s += f" ({self.note})"
        return s


def _grid(domain, n):
    lo, hi = domain
    if not (math.isfinite(lo) and math.isfinite(hi)):
        lo, hi = DEFAULT_WORKING_INTERVAL
    step = (hi - lo) / n
    # cell midpoints: never lands on the interval ends
    return [lo + (i + 0.5) * step for i in range(n)]


def _nonzero_on(spec, grid, label):
    vals = np.array([float(spec(x)) for x in grid])
    bad = np.flatnonzero(vals == 0.0)
    if bad.size:
        x = grid[bad[0]]
        raise SingularCoefficientError(f"{label} vanishes at grid point x={x}", x)
    return vals


def _ratio_derivative_values(f, g, ratio, grid):
    """Values of ``d/dx (g/f)`` on the grid."""
    if _is_poly(f, g):
        num = g.derivative() * f - g * f.derivative()
        return np.array([float(num(x)) / float(f(x)) ** 2 for x in grid])
    if ratio is not None:
        # difference the values, never a supplied derivative: that one is k f by construction
        return np.array([central_difference(ratio, x) for x in grid])
    df, dg = derivative(f), derivative(g)
    return np.array([(dg(x) * f(x) - g(x) * df(x)) / f(x) ** 2 for x in grid])


def check_chiellini(sys: LienardSystem, grid_size: int = 64, tol: Optional[float] = None) -> ChielliniCertificate:
    """Test ``d/dx (g/f) = k f`` and estimate ``k``.

    Exact path: for polynomial ``f`` dividing ``g`` the quotient is
    differentiated and compared with ``f`` coefficient-wise. Otherwise the
    ratio ``[d/dx (g/f)] / f`` is sampled on ``grid_size`` cell midpoints of
    the working interval; ``k`` is its median and the residual is
    ``max |d/dx (g/f) - k f|``.

    A vanishing ``k`` means ``g = A f``: the certificate is returned with
    ``holds=False`` and ``degenerate=True`` (use the k=0 branch).
    """
    if grid_size < 8:
        raise ValueError("grid_size must be at least 8")
    f, g = sys.f, sys.g
    poly = _is_poly(f, g)
    if tol is None:
        tol = POLY_TOL if poly else BLACKBOX_TOL
    grid = _grid(sys.domain, grid_size)
    fv = _nonzero_on(f, grid, "f")

    if poly:
        q, r = divmod(g, f)
        if r.is_zero():
            dq = q.derivative()
            if dq.is_zero():
                return ChielliniCertificate(False, 0.0, 0.0, tuple(grid), tol, exact=True,
                                            k_exact=Fraction(0), degenerate=True,
                                            note="degenerate: g = A f, use k=0 branch")
            if dq.degree == f.degree:
                k_ex = dq.leading / f.leading
                if dq == f * k_ex:
                    return ChielliniCertificate(True, float(k_ex), 0.0, tuple(grid), tol,
                                                exact=True, k_exact=k_ex)

    dr = _ratio_derivative_values(f, g, None if poly else sys.ratio, grid)
    k = float(np.median(dr / fv))
    residual = float(np.max(np.abs(dr - k * fv)))
    if abs(k) <= tol and residual <= tol:
        return ChielliniCertificate(False, 0.0, residual, tuple(grid), tol, degenerate=True,
                                    note="degenerate: g = A f, use k=0 branch")
    holds = residual <= tol
    return ChielliniCertificate(holds, k, residual, tuple(grid), tol)


def construct_g_from_f(f: FunctionSpec, k, C1) -> FunctionSpec:
    """``g = f (C1 + k int f)``; exact for polynomial ``f``."""
    if isinstance(f, Polynomial):
        return f * (Polynomial([C1]) + f.antiderivative() * as_fraction(k))
    F = antiderivative(f)
    k, C1 = float(k), float(C1)

    def g(x):
        return f(x) * (C1 + k * F(x))

    return BlackBox(g, f.domain, name=f"g[{f.name or 'f'}]")


def _radicand(g: FunctionSpec, k, C2):
    if isinstance(g, Polynomial):
        return Polynomial([C2]) + g.antiderivative() * (2 * as_fraction(k))
    G = antiderivative(g)
    k, C2 = float(k), float(C2)
    return BlackBox(lambda x: C2 + 2.0 * k * G(x), g.domain, deriv=lambda x: 2.0 * k * g(x),
                    name="radicand")


def construct_f_from_g(g: FunctionSpec, k, C2, sign: int = 1, interval=None) -> BlackBox:
    """``f = sign * g / sqrt(C2 + 2k int g)`` as a black box.

    ``interval`` (default: the finite domain of ``g``, if any) is scanned
    for a non-positive radicand, which raises :class:`DomainError` naming
    the offending ``x``.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    rad = _radicand(g, k, C2)
    kf = float(k)
    if interval is None and isinstance(g, BlackBox) and all(map(math.isfinite, g.domain)):
        interval = g.domain
    if interval is not None:
        for x in np.linspace(interval[0], interval[1], 1025):
            if float(rad(x)) <= 0.0:
                raise DomainError(f"C2 + 2k int g <= 0 at x={x:.17g}", float(x))
    dg = derivative(g)

    def _rad(x):
        r = float(rad(x))
        if r <= 0.0:
            raise DomainError(f"C2 + 2k int g = {r} <= 0 at x={x}", x)
        return r

    def f(x):
        return sign * g(x) / math.sqrt(_rad(x))

    def df(x):
        r = _rad(x)
        gx = g(x)
        return sign * (dg(x) * r - kf * gx * gx) / r ** 1.5

    zeros = tuple(g.real_roots(odd_only=True)) if isinstance(g, Polynomial) else None
    lo, hi = interval if interval is not None else (-math.inf, math.inf)
    return BlackBox(f, (lo, hi), deriv=df, name="f[g]", zeros=zeros)


def ratio_from_g(g: FunctionSpec, k, C2, sign: int = 1, domain=(-math.inf, math.inf)) -> BlackBox:
    """``g/f = sign * sqrt(C2 + 2k int g)`` for the ``f`` built by :func:`construct_f_from_g`."""
    rad = _radicand(g, k, C2)
    kf = float(k)

    def R(x):
        r = float(rad(x))
        if r <= 0.0:
            raise DomainError(f"C2 + 2k int g = {r} <= 0 at x={x}", x)
        return sign * math.sqrt(r)

    def dR(x):
        # d/dx sqrt(rad) = k g / sqrt(rad) = k f
        return sign * kf * float(g(x)) / math.sqrt(float(rad(x)))

    return BlackBox(R, domain, deriv=dR, name="g/f")


@dataclass(frozen=True)
class GeneralAbel:
    """``dv/dx = a + b v + f v^2 + g v^3`` on ``domain``."""

    a: FunctionSpec
    b: FunctionSpec
    f: FunctionSpec
    g: FunctionSpec
    domain: Tuple[float, float] = DEFAULT_WORKING_INTERVAL


@dataclass(frozen=True)
class StandardAbelPair:
    """Coefficients of ``dh/dx = A h^2 + B h^3`` after removing the linear term."""

    A: FunctionSpec
    B: FunctionSpec

    def as_system(self, domain=DEFAULT_WORKING_INTERVAL) -> LienardSystem:
        return LienardSystem(self.A, self.B, domain=domain)


@dataclass(frozen=True)
class Lemma2Result:
    holds: bool
    k1: float
    k2: float
    residuals: Tuple[float, float]


def check_lemma2(eq: GeneralAbel, grid_size: int = 64, tol: Optional[float] = None) -> Lemma2Result:
    """Test the two conditions making the general Abel equation integrable.

    ``d/dx [g e^B / f] = k1 f e^B`` with ``B = int b`` (anchored at 0), and
    ``a = k2 f^3 / g^2``. Both constants are grid medians of the defining
    ratios; ``holds`` when both residuals are within tolerance.
    """
    if grid_size < 8:
        raise ValueError("grid_size must be at least 8")
    a, b, f, g = eq.a, eq.b, eq.f, eq.g
    if tol is None:
        tol = POLY_TOL if _is_poly(a, b, f, g) else BLACKBOX_TOL
    grid = _grid(eq.domain, grid_size)
    fv = _nonzero_on(f, grid, "f")
    gv = _nonzero_on(g, grid, "g")

    if _is_zero(b):
        cert = check_chiellini(LienardSystem(f, g, domain=eq.domain), grid_size, tol)
        k1, res1, ok1 = cert.k, cert.residual, cert.holds
    else:
        B = antiderivative(b)
        eB = np.array([math.exp(float(B(x))) for x in grid])
        bv = np.array([float(b(x)) for x in grid])
        df, dg = derivative(f), derivative(g)
        dfv = np.array([float(df(x)) for x in grid])
        dgv = np.array([float(dg(x)) for x in grid])
        dh = eB * ((dgv + bv * gv) * fv - gv * dfv) / fv ** 2
        rhs = fv * eB
        k1 = float(np.median(dh / rhs))
        res1 = float(np.max(np.abs(dh - k1 * rhs)))
        ok1 = res1 <= tol

    av = np.array([float(a(x)) for x in grid])
    shape = fv ** 3 / gv ** 2
    k2 = float(np.median(av / shape))
    res2 = float(np.max(np.abs(av - k2 * shape)))
    return Lemma2Result(bool(ok1 and res2 <= tol), k1, k2, (res1, res2))


def reduce_levinson_smith(gamma: FunctionSpec, delta: FunctionSpec, f: FunctionSpec, g: FunctionSpec,
                          domain=DEFAULT_WORKING_INTERVAL) -> Union[GeneralAbel, StandardAbelPair]:
    """Reduce ``x'' + [gamma x'^2 + delta x' + f] x' + g = 0`` to an Abel equation.

    With ``gamma == 0`` the substitution ``v = e^{int delta} h`` gives the
    standard pair ``(f e^{int delta}, g e^{2 int delta})`` for
    :func:`check_chiellini`; otherwise the general Abel equation
    ``(gamma, delta, f, g)`` is returned for :func:`check_lemma2`.
    """
    if not _is_zero(gamma):
        return GeneralAbel(gamma, delta, f, g, domain)
    if _is_zero(delta):
        return StandardAbelPair(f, g)
    D = antiderivative(delta)
    df, dg = derivative(f), derivative(g)

    def A(x):
        return f(x) * math.exp(D(x))

    def dA(x):
        return (df(x) + delta(x) * f(x)) * math.exp(D(x))

    def B(x):
        return g(x) * math.exp(2.0 * D(x))

    def dB(x):
        return (dg(x) + 2.0 * delta(x) * g(x)) * math.exp(2.0 * D(x))

    return StandardAbelPair(BlackBox(A, deriv=dA, name="f e^D"), BlackBox(B, deriv=dB, name="g e^2D"))
