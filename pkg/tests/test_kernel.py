import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from lienard.exceptions import PoleError
from lienard.kernel import (
    G0,
    F_at_infinity,
    F_closed,
    F_finite_part_at_zero,
    F_prime,
    F_quadrature,
    KernelRegime,
    RegimeTag,
    kernel_poles,
    w_domain,
)


def _mp_F_difference(w1, w2, k):
    """High-precision oracle for F(w2) - F(w1)."""
    with mpmath.workdps(30):
        return float(k * mpmath.quad(lambda s: 1 / (s * (s * s + s + k)), [w1, w2]))


@pytest.mark.parametrize(
    "k, tag",
    [(2.0, RegimeTag.K_ABOVE_QUARTER), (0.25, RegimeTag.K_QUARTER), (0.25 + 5e-7, RegimeTag.K_QUARTER),
     (0.1, RegimeTag.K_BELOW_QUARTER), (-1.0, RegimeTag.K_BELOW_QUARTER), (0.0, RegimeTag.K_ZERO)],
)
def test_regime_selection(k, tag):
    assert KernelRegime.for_k(k).tag is tag


def test_regime_tag_must_match_k():
    with pytest.raises(ValueError):
        KernelRegime(RegimeTag.K_ABOVE_QUARTER, 0.1)


def test_known_values():
    # F(1, 1) carries the partial-fraction constants: F(inf) = -pi / (2 sqrt 3)
    expected = -math.pi / (2 * math.sqrt(3)) - _mp_F_difference(1.0, 1e8, 1.0) - 1.0 / (2 * 1e8 ** 2)
    assert F_closed(1.0, 1.0) == pytest.approx(expected, abs=1e-10)
    assert F_closed(1.0, 1.0) == pytest.approx(-1.1539059324121275, abs=1e-14)
    assert F_at_infinity(1.0, 1) == pytest.approx(-math.pi / (2 * math.sqrt(3)), abs=1e-15)
    assert F_at_infinity(1.0, -1) == pytest.approx(math.pi / (2 * math.sqrt(3)), abs=1e-15)
    # k = 1/4: ln(2/3) + 1/3
    assert F_closed(1.0, 0.25) == pytest.approx(math.log(2.0 / 3.0) + 1.0 / 3.0, abs=1e-15)


def test_k_zero_is_identically_zero():
    assert F_closed(3.0, 0.0) == 0.0
    assert F_quadrature(3.0, 1.0, 0.0) == 0.0


def test_poles():
    assert kernel_poles(1.0) == (0.0,)
    assert kernel_poles(0.25) == (-0.5, 0.0)
    lo, mid, hi = kernel_poles(-1.0)
    assert (lo, mid) == (pytest.approx(-(1 + math.sqrt(5)) / 2), 0.0)
    assert hi == pytest.approx((math.sqrt(5) - 1) / 2)
    with pytest.raises(PoleError):
        F_closed(0.0, 1.0)
    with pytest.raises(PoleError):
        F_closed(-0.5, 0.25)
    with pytest.raises(PoleError):
        F_quadrature(4.0, 0.5, -1.0)


def test_w_domain():
    d = w_domain(1.0, -1.0)
    assert d.w_lo == pytest.approx((math.sqrt(5) - 1) / 2) and d.w_hi == math.inf
    assert 2.0 in d and 0.1 not in d


def test_finite_part_at_zero():
    k = 1.0
    w = 1e-7
    assert F_closed(w, k) - math.log(w) == pytest.approx(F_finite_part_at_zero(k), abs=1e-6)


def test_array_evaluation():
    w = np.array([0.5, 1.0, 2.0])
    np.testing.assert_array_equal(F_closed(w, 2.0), [F_closed(v, 2.0) for v in w])


@pytest.mark.parametrize("side", [-1.0, 1.0])
def test_transition_band_continuity(side):
    # at the band edges the k != 1/4 branches meet the repeated-root form
    for scale in (1.0, 1.0000001, 1.5):
        k = 0.25 + side * 1e-6 * scale
        for w1, w2 in [(0.5, 4.0), (1.0, 2.0), (-4.0, -1.0)]:
            diff = F_closed(w2, k) - F_closed(w1, k)
            quarter = F_closed(w2, 0.25) - F_closed(w1, 0.25)
            assert diff == pytest.approx(quarter, abs=1e-6)


@pytest.mark.parametrize("k", [0.25 - 2e-6, 0.25 + 2e-6, 0.2, 0.3])
def test_near_quarter_branches_stay_accurate(k):
    for w1, w2 in [(0.5, 4.0), (1.0, 2.0), (-4.0, -1.0)]:
        diff = F_closed(w2, k) - F_closed(w1, k)
        assert diff == pytest.approx(_mp_F_difference(w1, w2, k), abs=1e-9)


def test_G0_against_simpson():
    # independent composite Simpson oracle on a fine grid
    n = 4000
    s = np.linspace(0.0, 1.0, n + 1)
    y = 1.0 / (s ** 3 + s ** 2 + 1.0)
    simpson = (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum()) / (3 * n)
    assert G0(1.0, 0.0, 0.0, 1.0) == pytest.approx(simpson, abs=1e-12)
    assert G0(1.0, 0.0, 0.0, 1.0) == pytest.approx(0.70927541190196719, abs=1e-12)
    assert G0(0.3, 0.3, 1.0, 1.0) == 0.0


def test_G0_pole():
    # s^3 + s^2 - 2 s = s (s - 1) (s + 2)
    with pytest.raises(PoleError) as exc:
        G0(2.0, 0.5, -2.0, 0.0)
    assert 1.0 in [pytest.approx(p) for p in exc.value.poles]


def _pole_free(w1, w2, k):
    lo, hi = min(w1, w2), max(w1, w2)
    margin = 1e-2
    return all(not (lo - margin <= p <= hi + margin) for p in kernel_poles(k))


@settings(max_examples=80, deadline=None)
@given(st.floats(-6, 6), st.floats(-6, 6), st.sampled_from([2.0, 1.0, 0.3, 0.25, 0.1, -1.0, 0.2500021]))
def test_closed_form_difference_matches_quadrature(w1, w2, k):
    assume(_pole_free(w1, w2, k))
    assert F_closed(w2, k) - F_closed(w1, k) == pytest.approx(F_quadrature(w2, w1, k), abs=1e-9)


@settings(max_examples=80, deadline=None)
@given(st.floats(-6, 6), st.sampled_from([2.0, 1.0, 0.3, 0.25, 0.1, -1.0]))
def test_derivative_identity(w, k):
    h = 1e-5
    assume(all(abs(w - p) > 0.1 for p in kernel_poles(k)))
    fd = (F_closed(w + h, k) - F_closed(w - h, k)) / (2 * h)
    assert fd == pytest.approx(F_prime(w, k), rel=1e-6, abs=1e-6)


def test_near_double_root_just_outside_band():
    # k just above the band: no real pole, but a spike of width ~1e-3 at w = -1/2
    k = 0.2500021
    with mpmath.workdps(40):
        oracle = float(k * mpmath.quad(lambda s: 1 / (s * (s * s + s + mpmath.mpf(k))), [-1, -0.5, -0.25]))
    assert F_closed(-0.25, k) - F_closed(-1.0, k) == pytest.approx(oracle, rel=1e-12)
    assert F_quadrature(-0.25, -1.0, k) == pytest.approx(oracle, rel=1e-12)


def test_band_treats_minus_half_as_pole():
    k = 0.25 + 1.1e-7
    assert -0.5 in kernel_poles(k)
    with pytest.raises(PoleError):
        F_quadrature(-0.25, -1.0, k)
    dom = w_domain(-0.25, k)
    assert dom.w_lo == -0.5 and dom.w_hi == 0.0
