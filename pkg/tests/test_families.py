import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lienard.families import generalized_vdp, invert_cubic_vdp, linear_f, linear_g
from lienard.integrability import check_chiellini
from lienard.solver import _Inverter


def test_cubic_examples():
    x = invert_cubic_vdp(-3.0)
    assert x == pytest.approx(2.1038034027355366, abs=1e-12)
    assert abs(x ** 3 - 3 * x - 3) <= 1e-12
    assert invert_cubic_vdp(-2.0 - 1e-9) == pytest.approx(2.0, abs=1e-4)
    assert invert_cubic_vdp(0.0) == pytest.approx(math.sqrt(3.0), abs=1e-14)
    with pytest.raises(ValueError):
        invert_cubic_vdp(float("nan"))


def test_cubic_large_positive_H():
    x = invert_cubic_vdp(50.0)
    assert x < -2.0 and abs(x ** 3 - 3 * x + 50.0) <= 1e-10


@pytest.mark.parametrize("factory", [linear_f, linear_g, generalized_vdp])
def test_builtins_are_integrable(factory):
    sys = factory()
    cert = check_chiellini(sys)
    assert cert.holds and cert.k == pytest.approx(sys.k, abs=1e-9)


def _agree_with_root_finder(sys, Ts):
    closed = _Inverter(sys)
    numeric = _Inverter(sys.__class__(sys.f, sys.g, sys.domain, sys.k, sys.ratio, sys.name))
    checked = 0
    for T in Ts:
        for cell in range(len(closed.cells)):
            lo, hi = closed.cells[cell]
            x_closed = sys.inverter(T, lo, hi)
            if x_closed is None:
                continue
            assert numeric(T, cell) == pytest.approx(x_closed, abs=1e-10, rel=1e-10)
            checked += 1
    return checked


@settings(max_examples=40, deadline=None)
@given(st.floats(0.6, 20.0))
def test_linear_f_closed_form_matches_root_finder(T):
    assert _agree_with_root_finder(linear_f(1, 1, 1, 1), [T]) == 2


@settings(max_examples=40, deadline=None)
@given(st.floats(1.01, 3.0))
def test_linear_g_closed_form_matches_root_finder(T):
    assert _agree_with_root_finder(linear_g(1, 0, 1, 1), [T]) == 2


@settings(max_examples=40, deadline=None)
@given(st.floats(5.0 / 3.0 + 1e-3, 30.0))
def test_vdp_closed_form_matches_root_finder(T):
    assert _agree_with_root_finder(generalized_vdp(1, 1, 1), [T]) == 1


def test_linear_f_inverter_out_of_range():
    sys = linear_f(1, 1, 1, 1)
    # g/f >= 1/2 everywhere
    assert sys.inverter(0.2, -1.0, math.inf) is None
