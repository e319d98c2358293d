"""Built-in integrable families with closed-form inversions of ``g/f = T``.

* ``linear_f``: ``f = a x + b``; ``g/f = C1 + k (b x + a x^2/2)`` is a quadratic.
* ``linear_g``: ``g = c x + d``; ``g/f = sign * sqrt(C2 + 2k (d x + c x^2/2))``.
* ``generalized_vdp``: ``f = -mu (1 - x^2)``; ``g/f = T`` is the cubic
  ``x^3 - 3x + H = 0`` with ``H = 3 (C1 - T) / (k mu)``.

Each inverter takes the target ``T`` and a monotone cell ``(lo, hi)`` and
returns the root in that cell, or ``None`` when the closed form does not
apply (the solver then falls back to a bracketed root).
"""
from __future__ import annotations

import math

from ._numerics import bracketed_root
from .funcmodel import Polynomial, as_fraction
from .integrability import (
    LienardSystem,
    construct_f_from_g,
    construct_g_from_f,
    ratio_from_g,
)

__all__ = ["linear_f", "linear_g", "generalized_vdp", "invert_cubic_vdp", "BUILTINS"]

# roots this close outside a cell are snapped to its edge (fold neighbourhood)
_EDGE_SLACK = 1e-9


def _pick_in_cell(candidates, lo, hi):
    for x in candidates:
        span = max(1.0, abs(x))
        if lo - _EDGE_SLACK * span <= x <= hi + _EDGE_SLACK * span:
            return min(max(x, lo), hi)
    return None


def _quadratic_branch(alpha, beta, gamma, lo, hi):
    """Root of ``alpha x^2 + beta x + gamma = 0`` lying in ``[lo, hi]``.

    The vertex ``-beta/(2 alpha)`` separates the two monotone branches, so
    the cell alone picks the sign of the square root.
    """
    if alpha == 0.0:
        return _pick_in_cell([-gamma / beta], lo, hi) if beta != 0.0 else None
    disc = beta * beta - 4.0 * alpha * gamma
    scale = beta * beta + abs(4.0 * alpha * gamma)
    if disc < 0.0:
        if disc < -1e-12 * scale:
            return None
        disc = 0.0
    vertex = -beta / (2.0 * alpha)
    half = math.sqrt(disc) / abs(2.0 * alpha)
    right = lo >= vertex - _EDGE_SLACK * max(1.0, abs(vertex))
    return _pick_in_cell([vertex + half if right else vertex - half], lo, hi)


def linear_f(a=1, b=1, k=1, C1=1, domain=(-3.0, 3.0)) -> LienardSystem:
    """``f = a x + b`` with ``g = f (C1 + k int f)``.

    ``x(T)`` is the quadratic-formula root
    ``[-bk +- sqrt(b^2 k^2 - 2ak (C1 - T))] / (ak)`` on the branch of the cell.
    """
    a, b, k, C1 = (as_fraction(v) for v in (a, b, k, C1))
    f = Polynomial([b, a])
    g = construct_g_from_f(f, k, C1)
    ratio = Polynomial([C1, k * b, k * a / 2])
    af, bf, kf, cf = float(a), float(b), float(k), float(C1)

    def inverter(T, lo, hi):
        return _quadratic_branch(af * kf / 2.0, bf * kf, cf - T, lo, hi)

    return LienardSystem(f, g, domain=domain, k=kf, ratio=ratio, name="eq48", inverter=inverter,
                         constants={"a": a, "b": b, "k": k, "C1": C1})


def linear_g(c=1, d=0, k=1, C2=1, sign=1, domain=(-3.0, 3.0)) -> LienardSystem:
    """``g = c x + d`` with ``f = sign * g / sqrt(C2 + 2k int g)``.

    ``x(T)`` solves ``c k x^2 + 2 d k x + C2 = T^2`` on the branch of the cell.
    """
    c, d, k, C2 = (as_fraction(v) for v in (c, d, k, C2))
    g = Polynomial([d, c])
    f = construct_f_from_g(g, k, C2, sign, interval=domain)
    ratio = ratio_from_g(g, k, C2, sign, domain=f.domain)
    cf, df, kf, c2 = float(c), float(d), float(k), float(C2)

    def inverter(T, lo, hi):
        if T * sign <= 0.0:
            return None
        return _quadratic_branch(cf * kf, 2.0 * df * kf, c2 - T * T, lo, hi)

    return LienardSystem(f, g, domain=domain, k=kf, ratio=ratio, name="eq53", inverter=inverter,
                         constants={"c": c, "d": d, "k": k, "C2": C2, "sign": sign})


def generalized_vdp(mu=1, k=1, C1=1, domain=(-2.5, 2.5)) -> LienardSystem:
    """``f = -mu (1 - x^2)`` with ``g = f (C1 + k int f)``, a quintic."""
    mu, k, C1 = (as_fraction(v) for v in (mu, k, C1))
    f = Polynomial([-mu, 0, mu])
    g = construct_g_from_f(f, k, C1)
    ratio = Polynomial([C1, -k * mu, 0, k * mu / 3])
    kmu, cf = float(k * mu), float(C1)

    def inverter(T, lo, hi):
        H = 3.0 * (cf - T) / kmu
        # the closed form gives the single root x > 2, which lives in the cell (1, inf)
        if H < -2.0 and lo >= 1.0 and math.isinf(hi):
            return _cardano(H)
        return None

    return LienardSystem(f, g, domain=domain, k=float(k), ratio=ratio, name="gvdp", inverter=inverter,
                         constants={"mu": mu, "k": k, "C1": C1})


def _cardano(H):
    D = (math.sqrt(H * H - 4.0) - H) ** (1.0 / 3.0)
    c = 2.0 ** (1.0 / 3.0)
    return c / D + D / c


def _cubic(H):
    return lambda x: (x * x - 3.0) * x + H


def invert_cubic_vdp(H) -> float:
    """Largest real root of ``x^3 - 3x + H = 0``.

    For ``H < -2`` (one real root, ``x > 2``) the radical formula
    ``x = 2^(1/3)/D + D/2^(1/3)``, ``D = (sqrt(H^2 - 4) - H)^(1/3)`` is used.
    Otherwise a bracketed root: ``[1, 2]`` for ``|H| <= 2`` and below ``-2``
    for ``H > 2``.
    """
    H = float(H)
    if math.isnan(H):
        raise ValueError("H is NaN: no real root")
    if math.isinf(H):
        raise ValueError("H must be finite")
    if H < -2.0:
        x = _cardano(H)
        # one Newton step cleans the cancellation in D near H = -2
        p = _cubic(H)
        d = 3.0 * x * x - 3.0
        return x - p(x) / d if d > 0.0 else x
    if H <= 2.0:
        return bracketed_root(_cubic(H), 1.0, 2.0, tol=0.0)
    return bracketed_root(_cubic(H), -(H ** (1.0 / 3.0) + 2.0), -2.0, tol=0.0)


BUILTINS = {"eq48": linear_f, "eq53": linear_g, "gvdp": generalized_vdp}
