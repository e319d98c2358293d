import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lienard.exceptions import PoleError, SingularCoefficientError, TimeRangeError
from lienard.families import generalized_vdp, linear_f, linear_g
from lienard.funcmodel import Polynomial
from lienard.integrability import LienardSystem
from lienard.solver import (
    ChielliniParams,
    InitialConditions,
    KZeroParams,
    characteristic_time,
    emit_time_series,
    fit_initial_conditions,
    solve_k_zero,
    solve_parametric,
    solve_trajectory,
)
from lienard.verify import relation_residual, velocity_residual


@pytest.fixture(scope="module")
def eq48():
    sys = linear_f(1, 1, 1, 1)
    return sys, fit_initial_conditions(sys, 1, InitialConditions(0.0, 1.0))


@pytest.fixture(scope="module")
def eq48_trajectory(eq48):
    sys, p = eq48
    return solve_trajectory(sys, p, 5.0)


def test_initial_conditions_validation():
    with pytest.raises(ValueError):
        InitialConditions(0.0, 0.0)
    with pytest.raises(ValueError):
        InitialConditions(math.nan, 1.0)


def test_fit_constants(eq48):
    _, p = eq48
    assert p.w0 == 1.0
    # C^-1 = e^{-F(1)} with g/f = 1 at x = 0
    assert p.C_inv == pytest.approx(3.1705527203, abs=1e-9)
    assert p.target(p.w0) == pytest.approx(1.0, rel=1e-14)


def test_fit_rejects_zero_damping():
    sys = linear_f(1, 1, 1, 1)
    with pytest.raises(SingularCoefficientError):
        fit_initial_conditions(sys, 1, InitialConditions(-1.0, 1.0))
    with pytest.raises(SingularCoefficientError):
        characteristic_time(sys, -1.0)
    assert characteristic_time(sys, 0.0) == 1.0


def test_fit_rejects_w0_on_pole():
    # k = -2: poles at w = 1 and w = -2
    sys = linear_f(1, 1, -2, 1)
    R0 = float(sys.ratio_function()(0.0))
    with pytest.raises(PoleError):
        fit_initial_conditions(sys, -2, InitialConditions(0.0, R0))


def test_parametric_invariants(eq48):
    sys, p = eq48
    sol = solve_parametric(sys, p, (0.5, 5.0), 256)
    assert sol.truncated is None
    assert relation_residual(sys, p, sol.w, sol.x) <= 1e-8
    assert velocity_residual(sys, sol.w, sol.x, sol.xdot) <= 1e-8
    assert np.all(np.diff(sol.t) > 0) or np.all(np.diff(sol.t) < 0)
    i0 = int(np.argmin(np.abs(sol.w - p.w0)))
    assert sol.w[i0] == p.w0 and sol.x[i0] == 0.0 and sol.t[i0] == 0.0


def test_parametric_flow_converges(eq48):
    sys, p = eq48
    errs = []
    for n in (128, 512):
        sol = solve_parametric(sys, p, (0.5, 5.0), n)
        dwdt = np.diff(sol.w) / np.diff(sol.t)
        wm = 0.5 * (sol.w[1:] + sol.w[:-1])
        xm = 0.5 * (sol.x[1:] + sol.x[:-1])
        rhs = np.array([float(sys.f(x)) for x in xm]) * (wm ** 2 + wm + 1.0)
        errs.append(np.max(np.abs(dwdt - rhs) / np.abs(rhs)))
    assert errs[1] < 1e-4 and errs[1] < errs[0] / 8


def test_parametric_truncates_at_fold(eq48):
    sys, p = eq48
    sol = solve_parametric(sys, p, (0.05, 5.0), 128)
    assert sol.truncated and "branch ends" in sol.truncated
    assert sol.w.min() > 0.2


def test_parametric_pole_in_range():
    sys = linear_f(1, 1, -2, 1)
    R0 = float(sys.ratio_function()(0.0))
    p = fit_initial_conditions(sys, -2, InitialConditions(0.0, R0 / 2.0))
    with pytest.raises(PoleError):
        solve_parametric(sys, p, (0.5, 3.0))


def test_trajectory_invariants(eq48, eq48_trajectory):
    sys, p = eq48
    sol = eq48_trajectory
    assert sol.t_span[0] == 0.0 and sol.t_span[1] >= 5.0
    assert np.all(np.diff(sol.t) > 0)
    finite = np.isfinite(sol.w) & (sol.w != 0)
    assert relation_residual(sys, p, sol.w[finite], sol.x[finite]) <= 1e-8
    assert velocity_residual(sys, sol.w, sol.x, sol.xdot) <= 1e-8


def test_trajectory_ode_residual_is_second_order(eq48, eq48_trajectory):
    sys, _ = eq48
    res = []
    for h in (0.02, 0.01):
        t = np.arange(0.1, 4.9, h)
        ts = emit_time_series(eq48_trajectory, t)
        x, v = ts[:, 1], ts[:, 2]
        xdd = (x[2:] - 2 * x[1:-1] + x[:-2]) / h ** 2
        xm = x[1:-1]
        r = xdd + np.array([float(sys.f(a)) for a in xm]) * v[1:-1] + np.array([float(sys.g(a)) for a in xm])
        res.append(np.max(np.abs(r)))
    assert res[1] < 1e-3
    assert math.log2(res[0] / res[1]) > 1.7


@pytest.mark.parametrize("factory,ic", [(linear_g, (1.0, 1.0)), (generalized_vdp, (0.5, 1.0))])
def test_trajectory_other_families(factory, ic):
    sys = factory()
    p = fit_initial_conditions(sys, sys.k, InitialConditions(*ic))
    sol = solve_trajectory(sys, p, 2.0, 64)
    assert sol.t[-1] >= 2.0
    assert velocity_residual(sys, sol.w, sol.x, sol.xdot) <= 1e-8


def test_trajectory_rejects_bad_end(eq48):
    sys, p = eq48
    with pytest.raises(ValueError):
        solve_trajectory(sys, p, 0.0)


def test_emit_time_series(eq48, eq48_trajectory):
    _, p = eq48
    ts = emit_time_series(eq48_trajectory, [0.0])
    assert ts[0, 1] == 0.0 and ts[0, 2] == 1.0
    with pytest.raises(TimeRangeError):
        emit_time_series(eq48_trajectory, [-0.1])
    with pytest.raises(TimeRangeError):
        emit_time_series(eq48_trajectory, [5.5])


def test_emit_refinement_converges(eq48):
    sys, p = eq48
    fine = solve_trajectory(sys, p, 3.0, 512)
    t = np.linspace(0.0, 3.0, 301)
    truth = emit_time_series(fine, t)[:, 1]
    errs = [np.max(np.abs(emit_time_series(solve_trajectory(sys, p, 3.0, n), t)[:, 1] - truth)) for n in (16, 64)]
    assert errs[1] < errs[0]


def test_emit_midpoint_stays_between_monotone_samples(eq48):
    sys, p = eq48
    sol = solve_parametric(sys, p, (0.5, 5.0), 64)
    order = np.argsort(sol.t)
    t, x = sol.t[order], sol.x[order]
    mid = emit_time_series(sol, 0.5 * (t[1:] + t[:-1]))[:, 1]
    lo, hi = np.minimum(x[1:], x[:-1]), np.maximum(x[1:], x[:-1])
    assert np.all(mid >= lo - 1e-15) and np.all(mid <= hi + 1e-15)


def test_k_zero_harmonic_free_motion():
    # f = 1, A = 0: x'' + x' = 0, x = x0 + xdot0 (1 - e^{-t})
    f = Polynomial([1])
    sol = solve_k_zero(f, 0.0, InitialConditions(0.0, 1.0), (1.0, 8.0), 512)
    assert isinstance(sol.params, KZeroParams)
    exact_x = 1.0 - np.exp(-sol.t)
    assert np.max(np.abs(sol.x - exact_x)) < 1e-12
    assert np.max(np.abs(sol.xdot - np.exp(-sol.t))) < 1e-12
    t = np.linspace(0.0, sol.t_span[1], 97)
    x, _ = sol.evaluate(t)
    assert np.max(np.abs(x - (1.0 - np.exp(-t)))) < 1e-8


def test_k_zero_constants():
    sol = solve_k_zero(Polynomial([1]), 1.0, InitialConditions(0.0, 1.0), (1.0, 1.5), 16)
    # 0 = ln 2 - 1 + K1
    assert sol.params.K1 == pytest.approx(1.0 - math.log(2.0), abs=1e-15)


def test_k_zero_rejects_pole_in_range():
    with pytest.raises(PoleError):
        solve_k_zero(Polynomial([1]), 1.0, InitialConditions(0.0, 1.0), (-2.0, 2.0))


@settings(max_examples=15, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(0.3, 3.0))
def test_relation_holds_for_random_initial_data(x0, xdot_scale):
    sys = linear_f(1, 1, 1, 1)
    R0 = float(sys.ratio_function()(x0))
    p = fit_initial_conditions(sys, 1, InitialConditions(x0, xdot_scale * R0))
    assert p.target(p.w0) == pytest.approx(R0, rel=1e-13)
    sol = solve_trajectory(sys, p, 1.0, 32)
    finite = np.isfinite(sol.w) & (sol.w != 0)
    assert relation_residual(sys, p, sol.w[finite], sol.x[finite]) <= 1e-8
