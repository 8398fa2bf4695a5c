import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import order_condition_residuals, tree_order
from rkq.problem import harmonic_problem
from rkq.tableau import (ButcherTableau, OrderNotMeasurable, StepFailure, builtin_tableaus,
                         cooper_verner8, empirical_order, euler, get_tableau, rk_step)

finite = st.floats(-5, 5, allow_nan=False)


@pytest.mark.parametrize("name", ["euler", "rk3", "rk4", "rk8"])
def test_builtin_invariants(name):
    tab = get_tableau(name)
    assert abs(tab.b.sum() - 1.0) <= 1e-14
    assert np.max(np.abs(tab.a.sum(axis=1) - tab.c)) <= 1e-14
    assert np.all(np.triu(tab.a) == 0)
    tab.check()


@pytest.mark.parametrize("name, stages, order", [("rk3", 3, 3), ("rk4", 4, 4)])
def test_builtin_shapes(name, stages, order):
    tab = builtin_tableaus()[name]
    assert (tab.stage_count, tab.declared_order) == (stages, order)


def test_rk8_shape():
    tab = builtin_tableaus()["rk8"]
    assert tab.declared_order == 8
    assert tab.stage_count >= 11


def test_rk8_order_conditions_extended_precision():
    mpmath.mp.dps = 50
    tab = cooper_verner8(mpmath.mpf, mpmath.sqrt)
    a = [[tab.a[i, j] for j in range(11)] for i in range(11)]
    res = order_condition_residuals(a, list(tab.b), list(tab.c), 9)
    assert len([t for t in res if tree_order(t) <= 8]) == 200
    assert max(abs(v) for t, v in res.items() if tree_order(t) <= 8) < mpmath.mpf(10) ** -40
    # not ninth order
    assert max(abs(v) for t, v in res.items() if tree_order(t) == 9) > 1e-8


def test_rejects_implicit_tableau():
    with pytest.raises(ValueError):
        ButcherTableau("bad", np.array([[0.5]]), np.array([1.0]), np.array([0.5]), 1)


def test_unknown_tableau():
    with pytest.raises(KeyError):
        get_tableau("rk99")


def test_rk_step_zero_rhs_is_identity():
    y = np.array([1.5, -2.0])
    for tab in builtin_tableaus().values():
        out = rk_step(tab, lambda t, y: np.zeros(2), 0.0, y, 0.3)
        np.testing.assert_array_equal(out, y)


def test_rk_step_euler():
    out = rk_step(euler(), lambda t, y: y, 0.0, np.array([1.0]), 0.1)
    assert out[0] == pytest.approx(1.1, abs=1e-15)


def test_rk_step_rk4_reproduces_taylor_polynomial():
    expected = float(sum(Fraction(1, 10) ** k / math.factorial(k) for k in range(5)))
    out = rk_step(get_tableau("rk4"), lambda t, y: y, 0.0, np.array([1.0]), 0.1)
    assert out[0] == pytest.approx(expected, abs=1e-15)
    assert out[0] == pytest.approx(1.1051708333333333, abs=1e-15)


def test_rk_step_does_not_mutate():
    y = np.array([0.2, 0.4])
    keep = y.copy()
    rk_step(get_tableau("rk8"), lambda t, y: -y, 0.0, y, 0.1)
    np.testing.assert_array_equal(y, keep)


def test_rk_step_failure_reports_stage():
    calls = []

    def rhs(t, y):
        calls.append(t)
        return np.array([np.inf]) if len(calls) == 3 else y

    with pytest.raises(StepFailure) as err:
        rk_step(get_tableau("rk4"), rhs, 0.0, np.array([1.0]), 0.1)
    assert err.value.stage == 2


@settings(max_examples=30, deadline=None)
@given(q=finite, p=finite, h=st.floats(1e-3, 1.0), name=st.sampled_from(["rk3", "rk4", "rk8"]))
def test_rk_step_deterministic(q, p, h, name):
    tab = get_tableau(name)
    rhs = harmonic_problem().rhs
    a = rk_step(tab, rhs, 0.0, np.array([q, p]), h)
    b = rk_step(tab, rhs, 0.0, np.array([q, p]), h)
    assert a.tobytes() == b.tobytes()


@settings(max_examples=30, deadline=None)
@given(k0=finite, k1=finite, h=st.floats(1e-3, 1.0), t=st.floats(0, 10),
       name=st.sampled_from(["euler", "rk3", "rk4", "rk8"]))
def test_shift_linearity_for_quadrature(k0, k1, h, t, name):
    tab = get_tableau(name)
    k = np.array([k0, k1])
    f = lambda t, y: np.array([math.sin(t), t * t])
    y = np.array([0.5, -0.25])
    shifted = rk_step(tab, lambda t, y: f(t, y) + k, t, y, h)
    plain = rk_step(tab, f, t, y, h)
    np.testing.assert_allclose(shifted, plain + h * k, rtol=0, atol=1e-13)


@pytest.mark.parametrize("name, hs, expected, tol", [
    ("euler", [0.1, 0.05, 0.025, 0.0125], 1, 0.1),
    ("rk3", [0.1, 0.05, 0.025, 0.0125], 3, 0.2),
    ("rk4", [0.1, 0.05, 0.025, 0.0125], 4, 0.2),
    ("rk8", [1.0, 0.5, 0.25, 0.125], 8, 0.5),
])
def test_empirical_order(name, hs, expected, tol):
    assert empirical_order(get_tableau(name), harmonic_problem(), hs) == pytest.approx(
        expected, abs=tol)


def test_empirical_order_floor(still_problem):
    still = harmonic_problem()
    # exact for rhs whose solution is a polynomial of low degree: use q' = 1, p' = 0
    from rkq.problem import IvpProblem
    lin = IvpProblem(rhs=lambda t, y: np.array([1.0, 0.0]), t0=0.0, y0=np.array([0.0, 0.0]),
                     exact_solution=lambda t: np.array([t, 0.0]))
    with pytest.raises(OrderNotMeasurable):
        empirical_order(get_tableau("rk4"), lin, [0.1, 0.05, 0.025, 0.0125])
    with pytest.raises(ValueError):
        empirical_order(get_tableau("rk4"), still, [0.1, 0.05, 0.025])
