"""Coefficient functions of one real variable.

Two kinds are supported:

* :class:`Polynomial` -- dense, ascending coefficients held as exact
  :class:`fractions.Fraction` values. Calculus and arithmetic are exact;
  floats only appear when the polynomial is evaluated at a float.
* :class:`BlackBox` -- an opaque deterministic evaluator on a declared
  interval, with numerical calculus (quadrature-backed antiderivatives,
  finite-difference derivatives) when no analytic derivative is supplied.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from ._numerics import adaptive_quadrature, central_difference
from .exceptions import DomainError

__all__ = [
    "Polynomial",
    "BlackBox",
    "FunctionSpec",
    "evaluate",
    "antiderivative",
    "derivative",
    "as_fraction",
    "parse_poly",
]


def as_fraction(value) -> Fraction:
    """Convert ints, floats, Fractions and strings like ``"3/2"`` exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            raise ValueError(f"coefficient must be finite, got {value!r}")
        return Fraction(float(value))
    if isinstance(value, np.integer):
        return Fraction(int(value))
    raise TypeError(f"cannot interpret {value!r} as a rational number")


@dataclass(frozen=True)
class Polynomial:
    """Dense polynomial ``c0 + c1 x + c2 x^2 + ...`` with rational coefficients.

    Trailing zeros are stripped; the zero polynomial is ``(0,)``.
    """

    coeffs: Tuple[Fraction, ...]

    def __init__(self, coeffs: Sequence = (0,)):
        cs = [as_fraction(c) for c in coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if not cs:
            cs = [Fraction(0)]
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "_float_coeffs", tuple(float(c) for c in cs))

    # construction helpers
    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls([c])

    @classmethod
    def identity(cls) -> "Polynomial":
        return cls([0, 1])

    @property
    def degree(self) -> int:
        return -1 if self.is_zero() else len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    def is_constant(self) -> bool:
        return len(self.coeffs) == 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1]

    @property
    def domain(self):
        return (-math.inf, math.inf)

    has_derivative = True

    def __call__(self, x):
        if isinstance(x, (Fraction, int)) and not isinstance(x, bool):
            acc = Fraction(0)
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        if isinstance(x, np.ndarray):
            acc = np.zeros_like(x, dtype=float)
            for c in reversed(self._float_coeffs):
                acc = acc * x + c
            return acc
        x = float(x)
        acc = 0.0
        for c in reversed(self._float_coeffs):
            acc = acc * x + c
        return acc

    # arithmetic
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        return Polynomial([other])

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Polynomial([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return Polynomial([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = as_fraction(other)
            return Polynomial([c * a for a in self.coeffs])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __divmod__(self, other: "Polynomial"):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dd = other.degree
        if self.degree < dd:
            return Polynomial([0]), self
        quot = [Fraction(0)] * (self.degree - dd + 1)
        lead = other.leading
        for i in range(self.degree - dd, -1, -1):
            q = rem[i + dd] / lead
            quot[i] = q
            if q:
                for j, c in enumerate(other.coeffs):
                    rem[i + j] -= q * c
        return Polynomial(quot), Polynomial(rem[:dd] if dd > 0 else [0])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Polynomial([other]).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    # calculus
    def derivative(self) -> "Polynomial":
        return Polynomial([i * c for i, c in enumerate(self.coeffs)][1:] or [0])

    def antiderivative(self) -> "Polynomial":
        """Antiderivative with zero constant term."""
        return Polynomial([0] + [c / (i + 1) for i, c in enumerate(self.coeffs)])

    def real_roots(self, lo=-math.inf, hi=math.inf, odd_only=False):
        """Sorted real roots in ``(lo, hi)``; with ``odd_only`` keep sign changes only."""
        if self.degree < 1:
            return []
        raw = np.roots([float(c) for c in reversed(self.coeffs)])
        scale = max(1.0, float(np.max(np.abs(raw)))) if raw.size else 1.0
        # repeated roots come back from the companion matrix as near-real pairs
        cands = sorted(_polish_root(self, float(r.real)) for r in raw if abs(r.imag) <= 1e-6 * scale)
        roots = []
        for r in cands:
            if roots and abs(r - roots[-1]) <= 1e-6 * max(1.0, abs(r)):
                continue
            roots.append(r)
        roots = [r for r in roots if lo < r < hi]
        if odd_only:
            roots = [r for r in roots if self._changes_sign_at(r)]
        return roots

    def _changes_sign_at(self, r: float) -> bool:
        d = 1e-5 * max(1.0, abs(r))
        return (self(r - d) > 0) != (self(r + d) > 0)

    def __repr__(self):
        return f"Polynomial([{', '.join(str(c) for c in self.coeffs)}])"

    def to_text(self) -> str:
        return "[" + ", ".join(str(c) for c in self.coeffs) + "]"


def _polish_root(p: Polynomial, r: float) -> float:
    dp = p.derivative()
    for _ in range(3):
        d = dp(r)
        if d == 0.0:
            break
        step = p(r) / d
        if not math.isfinite(step) or abs(step) > 1e-6 * max(1.0, abs(r)):
            break
        r -= step
    return r


@dataclass(frozen=True)
class BlackBox:
    """Opaque real function on ``domain`` (closed interval).

    ``func`` must be deterministic. ``deriv`` is an optional analytic
    derivative; without it :func:`derivative` falls back to central finite
    differences. ``anchor`` records the reference point of a
    quadrature-backed antiderivative (``F(anchor) == 0``).
    """

    func: Callable[[float], float]
    domain: Tuple[float, float] = (-math.inf, math.inf)
    deriv: Optional[Callable[[float], float]] = None
    anchor: Optional[float] = None
    name: str = ""
    zeros: Optional[Tuple[float, ...]] = field(default=None, compare=False)

    @property
    def has_derivative(self) -> bool:
        return self.deriv is not None

    def _check(self, x):
        lo, hi = self.domain
        if not (lo <= x <= hi):
            raise DomainError(f"{self.name or 'function'}: x={x!r} outside domain [{lo}, {hi}]", x)

    def __call__(self, x):
        if isinstance(x, np.ndarray):
            return np.array([self(float(v)) for v in x.ravel()]).reshape(x.shape)
        x = float(x)
        self._check(x)
        return float(self.func(x))

    def __repr__(self):
        return f"BlackBox({self.name or self.func!r}, domain={self.domain})"


FunctionSpec = Union[Polynomial, BlackBox]


def evaluate(spec: FunctionSpec, x):
    """Evaluate ``spec`` at ``x`` (exactly when both are rational)."""
    if isinstance(x, float) and not math.isfinite(x):
        raise DomainError(f"x must be finite, got {x!r}", x)
    return spec(x)


def antiderivative(spec: FunctionSpec, x_ref: float = 0.0) -> FunctionSpec:
    """Antiderivative of ``spec``.

    Polynomials integrate exactly with zero constant term. A black box
    gets a quadrature-backed black box ``F(x) = int_{x_ref}^x spec``; the
    anchor is recorded on the result.
    """
    if isinstance(spec, Polynomial):
        return spec.antiderivative()
    lo, hi = spec.domain
    if not (lo <= x_ref <= hi):
        raise DomainError(f"anchor x_ref={x_ref} outside domain [{lo}, {hi}]", x_ref)

    def F(x, _f=spec, _a=float(x_ref)):
        return adaptive_quadrature(_f, _a, x)

    return BlackBox(F, spec.domain, deriv=spec.func, anchor=float(x_ref),
                    name=f"int({spec.name or 'f'})")


def derivative(spec: FunctionSpec) -> FunctionSpec:
    """Derivative of ``spec``: exact for polynomials, analytic or central FD otherwise."""
    if isinstance(spec, Polynomial):
        return spec.derivative()
    if spec.deriv is not None:
        return BlackBox(spec.deriv, spec.domain, name=f"d({spec.name or 'f'})")

    def df(x, _f=spec):
        return central_difference(_f, x)

    return BlackBox(df, spec.domain, name=f"d({spec.name or 'f'})")


_POLY_RE = re.compile(r"^\s*(?:poly\s*:\s*)?\[(.*)\]\s*$", re.S)


def parse_poly(text: str) -> Polynomial:
    """Parse ``"[c0, c1, ...]"`` (optionally prefixed by ``poly:``) with rational literals."""
    m = _POLY_RE.match(text)
    if not m:
        raise ValueError(f"polynomial must look like '[c0, c1, ...]', got {text!r}")
    body = m.group(1).strip()
    if not body:
        raise ValueError("polynomial coefficient list is empty")
    return Polynomial([as_fraction(tok) for tok in body.split(",")])
