"""Kernel functions of the parametric solution.

``F(w, k) = k * int dw / (w (w^2 + w + k))`` in closed form on each of the
three discriminant regimes of ``w^2 + w + k``, a quadrature oracle for
differences of ``F``, and the cubic kernel ``G0(s, k1, k2)``.

The closed forms carry the additive constants of the classical
partial-fraction antiderivatives (no renormalisation), so only differences
of ``F`` along one pole-free interval are meaningful across regimes.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ._numerics import QUAD_TOL, ROOT_TOL, adaptive_quadrature, bracketed_root
from .exceptions import PoleError

__all__ = [
    "RegimeTag",
    "KernelRegime",
    "WDomain",
    "TRANSITION_BAND",
    "F_closed",
    "F_prime",
    "F_quadrature",
    "F_at_infinity",
    "F_finite_part_at_zero",
    "G0",
    "kernel_poles",
    "w_domain",
    "quadratic_q",
    "adaptive_quadrature",
    "bracketed_root",
]

TRANSITION_BAND = 1e-6


class RegimeTag(enum.Enum):
    K_ABOVE_QUARTER = "k>1/4"
    K_QUARTER = "k=1/4"
    K_BELOW_QUARTER = "k<1/4"
    K_ZERO = "k=0"


@dataclass(frozen=True)
class KernelRegime:
    """Analytic branch of ``F`` selected by ``k``.

    ``transition_band`` is the half width around ``k = 1/4`` inside which
    the repeated-root form is used.
    """

    tag: RegimeTag
    k: float
    transition_band: float = TRANSITION_BAND

    @classmethod
    def for_k(cls, k, transition_band=TRANSITION_BAND) -> "KernelRegime":
        k = float(k)
        if not math.isfinite(k):
            raise ValueError(f"k must be finite, got {k!r}")
        if k == 0.0:
            tag = RegimeTag.K_ZERO
        elif abs(k - 0.25) <= transition_band:
            tag = RegimeTag.K_QUARTER
        elif k > 0.25:
            tag = RegimeTag.K_ABOVE_QUARTER
        else:
            tag = RegimeTag.K_BELOW_QUARTER
        return cls(tag, k, transition_band)

    def __post_init__(self):
        k, eps = self.k, self.transition_band
        ok = {
            RegimeTag.K_ZERO: k == 0.0,
            RegimeTag.K_QUARTER: abs(k - 0.25) <= eps,
            RegimeTag.K_ABOVE_QUARTER: k > 0.25 and abs(k - 0.25) > eps,
            RegimeTag.K_BELOW_QUARTER: k < 0.25 and abs(k - 0.25) > eps and k != 0.0,
        }[self.tag]
        if not ok:
            raise ValueError(f"regime tag {self.tag.value} inconsistent with k={k}")


def _regime(regime_or_k) -> KernelRegime:
    if isinstance(regime_or_k, KernelRegime):
        return regime_or_k
    return KernelRegime.for_k(regime_or_k)


def quadratic_q(w, k):
    return w * w + w + k


def kernel_poles(k) -> Tuple[float, ...]:
    """Real zeros of ``w (w^2 + w + k)``, sorted.

    Inside the transition band around ``k = 1/4`` the repeated-root form of
    ``F`` is used, so ``w = -1/2`` is reported as a pole there as well.
    """
    k = float(k)
    poles = {0.0}
    disc = 1.0 - 4.0 * k
    if disc > 0.0:
        r = math.sqrt(disc)
        # stable pair: product of the roots is k
        big = -(1.0 + r) / 2.0
        poles.update({big, k / big})
    if abs(k - 0.25) <= TRANSITION_BAND:
        poles.add(-0.5)
    return tuple(sorted(poles))


@dataclass(frozen=True)
class WDomain:
    """Open pole-free interval of ``w`` on which ``F`` is real and smooth."""

    w_lo: float
    w_hi: float
    excluded: Tuple[float, ...]

    def __contains__(self, w):
        return self.w_lo < w < self.w_hi


def w_domain(w, k) -> WDomain:
    """The component of the real line minus the kernel poles that contains ``w``."""
    poles = kernel_poles(k)
    if w in poles:
        raise PoleError(f"w={w} is a kernel pole for k={k}", poles)
    lo, hi = -math.inf, math.inf
    for p in poles:
        if p < w:
            lo = p
        elif p > w and hi == math.inf:
            hi = p
    return WDomain(lo, hi, poles)


def _check_pole_free(a, b, k):
    lo, hi = min(a, b), max(a, b)
    bad = [p for p in kernel_poles(k) if lo <= p <= hi]
    if bad:
        raise PoleError(f"interval [{lo}, {hi}] contains kernel pole(s) {bad} for k={k}", bad)


def _atanh_ratio(z):
    """``0.5 * ln|(1 + z) / (1 - z)|`` for real ``z != +-1``."""
    if math.isinf(z):
        return 0.0
    if abs(z) < 1.0:
        return math.atanh(z)
    return math.atanh(1.0 / z)


def _log_w_over_sqrt_q(w, k):
    """``ln|w| - ln|w^2 + w + k| / 2`` evaluated without overflow at large ``|w|``."""
    if math.isinf(w):
        return 0.0
    if abs(w) >= 1.0:
        return -0.5 * math.log(abs(1.0 + (1.0 + k / w) / w))
    return math.log(abs(w)) - 0.5 * math.log(abs(quadratic_q(w, k)))


def _f_scalar(w, reg: KernelRegime, finite_part=False):
    k = reg.k
    tag = reg.tag
    if tag is RegimeTag.K_ZERO:
        return 0.0
    if w == 0.0 and not finite_part:
        raise PoleError("w=0 is a logarithmic pole of F", (0.0,))
    if tag is RegimeTag.K_QUARTER:
        if w == -0.5:
            raise PoleError("w=-1/2 is a pole of F for k=1/4", (-0.5,))
        if finite_part:
            return math.log(2.0) - math.log(abs(1.0 + 2.0 * w)) + 1.0 / (1.0 + 2.0 * w)
        if math.isinf(w):
            return 0.0
        if abs(w) >= 1.0:
            return -math.log(abs(1.0 + 0.5 / w)) + 1.0 / (1.0 + 2.0 * w)
        return math.log(abs(2.0 * w / (1.0 + 2.0 * w))) + 1.0 / (1.0 + 2.0 * w)
    q = quadratic_q(w, k) if math.isfinite(w) else math.inf
    if tag is RegimeTag.K_ABOVE_QUARTER:
        r = math.sqrt(4.0 * k - 1.0)
        tail = -math.atan((1.0 + 2.0 * w) / r) / r
        if finite_part:
            return -0.5 * math.log(q) + tail
        return _log_w_over_sqrt_q(w, k) + tail
    # K_BELOW_QUARTER, including k < 0
    if q == 0.0:
        raise PoleError(f"w={w} is a root of w^2+w+k for k={k}", kernel_poles(k))
    s = math.sqrt(1.0 - 4.0 * k)
    z = (1.0 + 2.0 * w) / s
    tail = _atanh_ratio(z) / s
    if finite_part:
        return -0.5 * math.log(abs(q)) + tail
    return _log_w_over_sqrt_q(w, k) + tail


def F_closed(w, regime):
    """Closed-form kernel ``F(w, k)``.

    Parameters
    ----------
    w : float or ndarray
        Evaluation point(s); ``+-inf`` returns the limiting value.
    regime : KernelRegime or float
        Regime object, or ``k`` itself.

    Raises
    ------
    PoleError
        ``w`` is a zero of ``w (w^2 + w + k)``.
    """
    reg = _regime(regime)
    if isinstance(w, np.ndarray):
        return np.array([_f_scalar(float(v), reg) for v in w.ravel()]).reshape(w.shape)
    return _f_scalar(float(w), reg)


def F_prime(w, k):
    """``dF/dw = k / (w (w^2 + w + k))``."""
    return k / (w * quadratic_q(w, k))


def F_at_infinity(regime, sign=1):
    """``lim F(w)`` as ``w -> sign * inf`` (nonzero only for ``k > 1/4``)."""
    return _f_scalar(math.copysign(math.inf, sign), _regime(regime))


def F_finite_part_at_zero(regime):
    """``lim_{w -> 0} (F(w) - ln|w|)``: the constant in ``e^F ~ const * w``."""
    reg = _regime(regime)
    if reg.tag is RegimeTag.K_ZERO:
        raise ValueError("F is identically zero for k=0; no logarithmic pole")
    return _f_scalar(0.0, reg, finite_part=True)


# relative floor for large integrals near a double root, where an absolute target is out of reach
_QUAD_RTOL = 1e-13


def F_quadrature(w, w_ref, k, tol=QUAD_TOL):
    """``k * int_{w_ref}^{w} ds / (s (s^2 + s + k))`` by adaptive quadrature.

    Independent oracle for ``F_closed(w) - F_closed(w_ref)``.
    """
    w, w_ref, k = float(w), float(w_ref), float(k)
    if w == w_ref or k == 0.0:
        return 0.0
    _check_pole_free(w_ref, w, k)
    # for k just above 1/4 the integrand spikes at the real part -1/2 of the complex roots
    points = [-0.5] if k > 0.25 and min(w, w_ref) < -0.5 < max(w, w_ref) else None
    return k * adaptive_quadrature(lambda s: 1.0 / (s * (s * s + s + k)), w_ref, w, tol=tol / abs(k),
                                   rtol=_QUAD_RTOL, points=points)


def _cubic_real_roots(k1, k2):
    roots = np.roots([1.0, 1.0, k1, k2])
    return sorted(float(r.real) for r in roots if abs(r.imag) <= 1e-12 * max(1.0, abs(r)))


def G0(s, s_ref, k1, k2, tol=QUAD_TOL):
    """``int_{s_ref}^{s} ds / (s^3 + s^2 + k1 s + k2)`` by adaptive quadrature."""
    s, s_ref = float(s), float(s_ref)
    if s == s_ref:
        return 0.0
    lo, hi = min(s, s_ref), max(s, s_ref)
    roots = _cubic_real_roots(k1, k2)
    bad = [r for r in roots if lo <= r <= hi]
    if bad:
        raise PoleError(f"[{lo}, {hi}] contains real root(s) {bad} of s^3+s^2+{k1}s+{k2}", roots)
    return adaptive_quadrature(lambda x: 1.0 / (((x + 1.0) * x + k1) * x + k2), s_ref, s, tol=tol)
