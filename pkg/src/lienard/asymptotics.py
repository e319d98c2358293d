"""Limiting forms of the exact solution.

Small ``w`` (``w << k``): ``F(w) = ln|w| + F0 + O(w)``, so the defining
relation becomes ``g/f ~ C^{-1} e^{F0} w`` and ``dt ~ dw / (k f)``.
Large ``w``: ``F(w) = F(+-inf) - k / (2 w^2) + O(w^-3)``, so
``g/f ~ C^{-1} e^{F(+-inf)} e^{-k/2w^2}`` and ``dt ~ dw / (f w^2)``.

The constants ``e^{F0}`` and ``e^{F(+-inf)}`` come from the additive
constants of the closed-form kernel; they are folded into ``C^{-1}`` so
that the approximations share the constant fitted for the exact solution.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import dawsn

from ._numerics import adaptive_quadrature
from .integrability import LienardSystem
from .kernel import F_at_infinity, F_finite_part_at_zero
from .solver import ChielliniParams, _Inverter

__all__ = [
    "AsymptoticRegime",
    "RegimeTag",
    "Approximation",
    "erfi",
    "approx_small_w",
    "approx_large_w",
    "approx_linear_f_small_x",
    "approx_linear_f_large_x",
    "SMALL_W_FACTOR",
    "LARGE_W_FACTOR",
]

SMALL_W_FACTOR = 0.1
LARGE_W_FACTOR = 10.0
_SERIES_LIMIT = 3.0
_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)


class RegimeTag(enum.Enum):
    SMALL_W = "small-w"
    LARGE_W = "large-w"
    SMALL_X = "small-x"
    LARGE_X = "large-x"


@dataclass(frozen=True)
class AsymptoticRegime:
    tag: RegimeTag
    condition: str
    valid: bool


@dataclass(frozen=True)
class Approximation:
    """An approximate point ``(x, t)`` with the regime it was computed in."""

    x: float
    t: float
    regime: AsymptoticRegime

    def __iter__(self):
        return iter((self.x, self.t))


def erfi(z):
    """Imaginary error function ``(2/sqrt(pi)) int_0^z e^{s^2} ds``.

    Maclaurin series for ``|z| <= 3``; beyond, ``erfi(z) = (2/sqrt(pi)) e^{z^2} D(z)``
    with Dawson's integral ``D``.
    """
    if isinstance(z, np.ndarray):
        return np.array([erfi(float(v)) for v in z.ravel()]).reshape(z.shape)
    z = float(z)
    if abs(z) > _SERIES_LIMIT:
        return _TWO_OVER_SQRT_PI * math.exp(z * z) * float(dawsn(z))
    z2 = z * z
    term = z            # z^{2n+1} / n!
    total = z
    n = 0
    while True:
        n += 1
        term *= z2 / n
        add = term / (2 * n + 1)
        total += add
        if abs(add) <= 1e-17 * abs(total):
            break
    return _TWO_OVER_SQRT_PI * total


def _regime(tag, ok, condition):
    reg = AsymptoticRegime(tag, condition, bool(ok))
    if not ok:
        warnings.warn(f"{tag.value} approximation used outside its regime ({condition})", RuntimeWarning,
                      stacklevel=3)
    return reg


def _cell(sys, params):
    return sys.cell_index(params.x0)


def approx_small_w(sys: LienardSystem, params: ChielliniParams, w, factor: float = SMALL_W_FACTOR,
                   t_ref: float = None, w_ref: float = None) -> Approximation:
    """``g/f ~ C^{-1} e^{F0} w`` and ``t - t_ref ~ (1/k) int_{w_ref}^{w} dw / f(x(w))``.

    ``w_ref``/``t_ref`` default to ``w0``/``t0``. The root is taken on the
    branch (monotone cell) of ``x0``. Flagged invalid unless
    ``|w| < factor * |k|``.
    """
    w = float(w)
    k = params.k
    reg = _regime(RegimeTag.SMALL_W, abs(w) < factor * abs(k), f"|w| < {factor} |k|")
    inv = _Inverter(sys)
    cell = _cell(sys, params)
    c = params.c_inv_for(1 if w > 0 else -1) * math.exp(F_finite_part_at_zero(params.regime))

    def x_of(s):
        return inv(c * s, cell)

    x = x_of(w)
    w_ref = params.w0 if w_ref is None else float(w_ref)
    t_ref = params.t0 if t_ref is None else float(t_ref)
    t = t_ref + adaptive_quadrature(lambda s: 1.0 / float(sys.f(x_of(s))), w_ref, w) / k
    return Approximation(x, t, reg)


def approx_large_w(sys: LienardSystem, params: ChielliniParams, w, factor: float = LARGE_W_FACTOR,
                   t_ref: float = None, w_ref: float = None) -> Approximation:
    """``g/f ~ C^{-1} e^{F(+-inf)} e^{-k/2w^2}`` and ``t - t_ref ~ int dw / (f(x(w)) w^2)``.

    Flagged invalid unless ``|w| > factor * max(|k|, 1)``.
    """
    w = float(w)
    k = params.k
    reg = _regime(RegimeTag.LARGE_W, abs(w) > factor * max(abs(k), 1.0), f"|w| > {factor} max(|k|, 1)")
    inv = _Inverter(sys)
    cell = _cell(sys, params)
    sign = 1 if w > 0 else -1
    c = params.c_inv_for(sign) * math.exp(F_at_infinity(params.regime, sign))

    def x_of(s):
        return inv(c * math.exp(-k / (2.0 * s * s)), cell)

    x = x_of(w)
    w_ref = params.w0 if w_ref is None else float(w_ref)
    t_ref = params.t0 if t_ref is None else float(t_ref)
    t = t_ref + adaptive_quadrature(lambda s: 1.0 / (float(sys.f(x_of(s))) * s * s), w_ref, w)
    return Approximation(x, t, reg)


def approx_linear_f_small_x(a, b, k, C, C1, t, t0: float = 0.0) -> Approximation:
    """Exponential law ``x ~ e^{a (t - t0) / (b C)} / (a b k) - b/a`` for ``f = a x + b``.

    Valid while the neglected term ``k a x^2 / 2`` of ``g/f`` stays small
    against ``|C1 + k b x|``; the check is made a posteriori.
    """
    a, b, k, C, C1 = (float(v) for v in (a, b, k, C, C1))
    x = math.exp(a * (float(t) - t0) / (b * C)) / (a * b * k) - b / a
    quad = abs(k * a * x * x / 2.0)
    ok = quad <= 0.1 * max(abs(C1 + k * b * x), 1e-300)
    reg = _regime(RegimeTag.SMALL_X, ok, "k a x^2 / 2 << |C1 + k b x|")
    return Approximation(x, float(t), reg)


def approx_linear_f_large_x(a, b, k, C, w, t0: float = 0.0) -> Approximation:
    """Large-``x`` law for ``f = a x + b``.

    ``x ~ sqrt(2 C^{-1} / (k a)) e^{-k / 4w^2}`` and
    ``t - t0 ~ -sqrt(pi C / (2a)) erfi(sqrt(k) / (2w))``. Valid when
    ``a x / 2 >> b``.
    """
    a, b, k, C, w = (float(v) for v in (a, b, k, C, w))
    x = math.sqrt(2.0 / (C * k * a)) * math.exp(-k / (4.0 * w * w))
    t = t0 - math.sqrt(math.pi * C / (2.0 * a)) * erfi(math.sqrt(k) / (2.0 * w))
    reg = _regime(RegimeTag.LARGE_X, a * x / 2.0 >= 10.0 * abs(b), "a x / 2 >> b")
    return Approximation(x, t, reg)
