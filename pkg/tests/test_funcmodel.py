import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lienard.exceptions import DomainError
from lienard.funcmodel import (
    BlackBox,
    Polynomial,
    antiderivative,
    as_fraction,
    derivative,
    evaluate,
    parse_poly,
)

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=50)
polys = st.lists(rationals, min_size=1, max_size=6).map(Polynomial)


def test_evaluate_exact_rational():
    p = Polynomial([1, 2, "3/2", "1/2"])
    assert evaluate(p, 1) == Fraction(5)
    assert evaluate(p, Fraction(1, 2)) == Fraction(1) + 1 + Fraction(3, 8) + Fraction(1, 16)


def test_evaluate_float_and_array():
    p = Polynomial([1, -3, 0, 1])
    assert p(2.0) == pytest.approx(3.0)
    np.testing.assert_allclose(p(np.array([0.0, 1.0, 2.0])), [1.0, -1.0, 3.0])


def test_trailing_zeros_normalised():
    assert Polynomial([1, 2, 0, 0]) == Polynomial([1, 2])
    assert Polynomial([]).is_zero()
    assert Polynomial([0, 0]).degree == -1


def test_antiderivative_has_zero_constant():
    F = Polynomial([3, 2, 1]).antiderivative()
    assert F.coeffs == (0, 3, 1, Fraction(1, 3))


def test_divmod_exact():
    g = Polynomial([1, 2, "3/2", "1/2"])
    q, r = divmod(g, Polynomial([1, 1]))
    assert r.is_zero()
    assert q == Polynomial([1, 1, "1/2"])


def test_real_roots_and_sign_changes():
    assert Polynomial([-1, 0, 1]).real_roots() == pytest.approx([-1.0, 1.0])
    # a double root does not change sign
    assert Polynomial([1, 2, 1]).real_roots(odd_only=True) == []
    assert Polynomial([1, 2, 1]).real_roots() == pytest.approx([-1.0])


def test_parse_poly():
    assert parse_poly("[1, 2, 3/2]") == Polynomial([1, 2, "3/2"])
    assert parse_poly("poly: [0.5]") == Polynomial([Fraction(1, 2)])
    with pytest.raises(ValueError):
        parse_poly("1 + x")
    with pytest.raises(ValueError):
        parse_poly("[]")


def test_as_fraction_rejects_nonfinite():
    with pytest.raises(ValueError):
        as_fraction(float("nan"))


def test_blackbox_domain_checked():
    f = BlackBox(math.sqrt, (0.0, 4.0), name="sqrt")
    assert f(4.0) == 2.0
    with pytest.raises(DomainError) as exc:
        f(-1.0)
    assert exc.value.x == -1.0


def test_blackbox_antiderivative_anchor():
    F = antiderivative(BlackBox(math.sin))
    assert F.anchor == 0.0
    assert F(1.0) == pytest.approx(1.0 - math.cos(1.0), abs=1e-12)
    with pytest.raises(DomainError):
        antiderivative(BlackBox(math.sqrt, (1.0, 2.0)), x_ref=0.0)


def test_blackbox_derivative_fallbacks():
    fd = derivative(BlackBox(math.sin))
    assert fd(0.3) == pytest.approx(math.cos(0.3), abs=1e-9)
    exact = derivative(BlackBox(math.sin, deriv=math.cos))
    assert exact(0.3) == math.cos(0.3)


@settings(max_examples=60, deadline=None)
@given(polys, polys)
def test_divmod_identity(a, b):
    if b.is_zero():
        return
    q, r = divmod(a, b)
    assert q * b + r == a
    assert r.degree < b.degree or r.is_zero()


@settings(max_examples=60, deadline=None)
@given(polys)
def test_derivative_inverts_antiderivative(p):
    assert p.antiderivative().derivative() == p


@settings(max_examples=60, deadline=None)
@given(polys, polys, rationals)
def test_evaluation_is_a_ring_homomorphism(a, b, x):
    assert (a * b)(x) == a(x) * b(x)
    assert (a + b)(x) == a(x) + b(x)
