import math
import warnings

import numpy as np
import pytest
import mpmath
from scipy.special import dawsn

from lienard.asymptotics import (
    RegimeTag,
    approx_large_w,
    approx_linear_f_large_x,
    approx_linear_f_small_x,
    approx_small_w,
    erfi,
)
from lienard.families import linear_f
from lienard.kernel import F_finite_part_at_zero
from lienard.solver import InitialConditions, _Inverter, fit_initial_conditions, solve_trajectory


@pytest.mark.parametrize("z", [0.0, 0.1, -0.5, 1.0, 2.0, 2.9, 3.1, 4.0, -4.0])
def test_erfi_matches_mpmath(z):
    assert erfi(z) == pytest.approx(float(mpmath.erfi(z)), rel=1e-12, abs=1e-15)


def test_erfi_golden_and_odd():
    assert erfi(1.0) == pytest.approx(1.6504257587975424, abs=1e-10)
    z = np.array([0.3, 1.7, 3.5])
    assert np.allclose(erfi(-z), -erfi(z), rtol=0, atol=0)


def test_erfi_series_and_dawson_agree_at_switch():
    z = 3.0
    dawson_form = 2.0 / math.sqrt(math.pi) * math.exp(z * z) * dawsn(z)
    assert erfi(z) == pytest.approx(dawson_form, rel=1e-12)


@pytest.fixture(scope="module")
def small_w_setup():
    # g/f = x^2/2 + x - 1 + 1/(x+1); ratio min 1/2 is irrelevant with C1 = -1 near x = 1
    sys = linear_f(1, 1, 1, -1)
    R0 = float(sys.ratio_function()(1.0))
    p = fit_initial_conditions(sys, 1, InitialConditions(1.0, R0 / 0.5))
    return sys, p


def _exact_x(sys, p, w):
    return _Inverter(sys)(p.target(w), sys.cell_index(p.x0))


def test_small_w_error_decreases(small_w_setup):
    sys, p = small_w_setup
    errs = []
    for w in (0.1, 0.05, 0.025, 0.0125):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            ap = approx_small_w(sys, p, w)
        xe = _exact_x(sys, p, w)
        errs.append(abs(ap.x - xe) / abs(xe))
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[0] < 0.05 and errs[-1] < 1e-3


def test_small_w_regime_flag(small_w_setup):
    sys, p = small_w_setup
    with pytest.warns(RuntimeWarning):
        ap = approx_small_w(sys, p, 0.5)
    assert not ap.regime.valid
    ap = approx_small_w(sys, p, 0.05)
    assert ap.regime.valid and ap.regime.tag is RegimeTag.SMALL_W
    x, t = ap
    assert t > 0 or t < 0


def test_large_w_error_decreases():
    sys = linear_f(1, 1, 1, 1)
    p = fit_initial_conditions(sys, 1, InitialConditions(0.0, 1.0))
    errs = []
    for w in (12.0, 24.0, 48.0, 96.0):
        xe = _exact_x(sys, p, w)
        errs.append(abs(approx_large_w(sys, p, w).x - xe) / abs(xe))
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-5


def test_linear_f_small_x_law():
    a = b = k = 1.0
    C1 = 0.001
    sys = linear_f(a, b, k, C1)
    x0, w0 = 0.001, 0.01
    R0 = float(sys.ratio_function()(x0))
    p = fit_initial_conditions(sys, k, InitialConditions(x0, R0 / w0))
    C = 1.0 / (p.C_inv * math.exp(F_finite_part_at_zero(p.regime)))
    t0 = -(b * C / a) * math.log(a * b * k * (x0 + b / a))
    sol = solve_trajectory(sys, p, 0.2)
    for t in (0.0, 0.02, 0.05, 0.1):
        xe = sol.evaluate([t])[0][0]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            xa = approx_linear_f_small_x(a, b, k, C, C1, t, t0).x
        assert abs(xa - xe) <= 0.08 * abs(xe)


def test_linear_f_large_x_formula():
    a, b, k, C = 2.0, 0.1, 1.0, 0.01
    ap = approx_linear_f_large_x(a, b, k, C, 5.0)
    assert ap.x == pytest.approx(math.sqrt(2.0 / (C * k * a)) * math.exp(-k / 100.0))
    assert ap.t == pytest.approx(-math.sqrt(math.pi * C / (2 * a)) * erfi(0.1))
    assert ap.regime.valid and ap.regime.tag is RegimeTag.LARGE_X


def test_linear_f_large_x_error_shrinks_with_x():
    from lienard.kernel import F_at_infinity

    a, b, k, C1 = 1.0, 0.01, 1.0, 1.0
    sys = linear_f(a, b, k, C1, domain=(-3.0, 300.0))
    R = sys.ratio_function()
    inv = _Inverter(sys)
    errs = []
    for x0 in (5.0, 20.0, 80.0):
        p = fit_initial_conditions(sys, k, InitialConditions(x0, float(R(x0)) / 40.0))
        C = 1.0 / (p.c_inv_for(1) * math.exp(F_at_infinity(p.regime, 1)))
        xe = inv(p.target(40.0), sys.cell_index(x0))
        errs.append(abs(approx_linear_f_large_x(a, b, k, C, 40.0).x - xe) / xe)
    assert errs[0] > errs[1] > errs[2]
    assert errs[-1] < 1e-3
