"""Quadrature, bracketed root finding and finite differences.

These are thin contracts over QUADPACK (``scipy.integrate.quad``) and
Brent's method (``scipy.optimize.brentq``); the wrappers translate their
failure modes into the package exceptions.
"""
import math
import sys
import warnings

from scipy import integrate, optimize

from .exceptions import BracketError, QuadratureError

EPS = sys.float_info.epsilon
# cube root of machine epsilon: balances O(h^2) truncation against eps/h roundoff
FD_STEP = EPS ** (1.0 / 3.0)

QUAD_TOL = 1e-11
ROOT_TOL = 1e-12
MAX_SUBDIVISIONS = 400


def adaptive_quadrature(integrand, a, b, tol=QUAD_TOL, rtol=0.0, limit=MAX_SUBDIVISIONS, points=None):
    """Integrate ``integrand`` over ``[a, b]`` to absolute accuracy ``tol``.

    Globally adaptive bisection with a 21-point Gauss-Kronrod rule
    (QUADPACK QAGS). Reversed limits give the negated integral and
    ``a == b`` returns exactly 0.

    Raises
    ------
    QuadratureError
        The subdivision cap was hit (or QUADPACK reported another failure)
        before the error estimate dropped below ``max(tol, rtol*|I|)``.
        The exception carries the best estimate and its error bound.
    """
    if a == b:
        return 0.0
    if not (math.isfinite(a) and math.isfinite(b)):
        raise QuadratureError("integration limits must be finite")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, err, info, *rest = integrate.quad(
            integrand, a, b, epsabs=tol, epsrel=rtol, limit=limit,
            points=points, full_output=1,
        )
    ier = rest[0] if rest else 0
    if not math.isfinite(value):
        raise QuadratureError(f"non-finite integral on [{a}, {b}]", value, err)
    if ier != 0 and err > max(tol, rtol * abs(value)):
        msg = rest[1] if len(rest) > 1 else "quadrature failure"
        raise QuadratureError(
            f"accuracy not reached on [{a}, {b}]: estimate {value!r} +/- {err:.3g} ({msg.strip()})",
            value, err,
        )
    return value


def bracketed_root(fn, lo, hi, tol=ROOT_TOL):
    """Return a root of ``fn`` inside ``[lo, hi]`` by Brent's method.

    Superlinear inverse-quadratic/secant steps with a bisection fallback.
    Terminates once the bracket is narrower than ``tol * max(1, |x|)``;
    ``tol=0`` asks for full machine precision.

    Raises
    ------
    BracketError
        ``fn(lo)`` and ``fn(hi)`` have the same strict sign.
    """
    flo = fn(lo)
    if flo == 0.0:
        return float(lo)
    fhi = fn(hi)
    if fhi == 0.0:
        return float(hi)
    if math.isnan(flo) or math.isnan(fhi):
        raise BracketError(f"function is NaN at bracket end: f({lo})={flo}, f({hi})={fhi}")
    if (flo > 0) == (fhi > 0):
        raise BracketError(f"no sign change on [{lo}, {hi}]: f(lo)={flo:.6g}, f(hi)={fhi:.6g}")
    xtol = max(tol / 2.0, 1e-300)
    rtol = max(tol / 2.0, 4.0 * EPS)
    return optimize.brentq(fn, lo, hi, xtol=xtol, rtol=rtol, maxiter=500)


def central_difference(fn, x):
    """Central difference with the scaled step ``cbrt(eps) * max(1, |x|)``."""
    h = FD_STEP * max(1.0, abs(x))
    # exact representable step keeps x+h and x-h symmetric
    h = (x + h) - x
    return (fn(x + h) - fn(x - h)) / (2.0 * h)
