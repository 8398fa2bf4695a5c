import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import rotation
from rkq.problem import harmonic_problem
from rkq.tableau import cooper_verner8, get_tableau, rk_step
from rkq.tracker import (RICHARDSON_FACTOR, ReferenceState, propagate_global_error,
                         reference_error_guard, reference_step)

RK8 = get_tableau("rk8")
# exact doubling needs results that stay clear of the subnormal range
small = st.floats(-1e-6, 1e-6).filter(lambda x: x == 0 or abs(x) > 1e-200)


def mp_harmonic(t, y):
    return np.array([y[1], -y[0]], dtype=object)


@pytest.fixture
def rk8_mp():
    mpmath.mp.dps = 40
    return cooper_verner8(mpmath.mpf, mpmath.sqrt)


def test_richardson_factor():
    assert RICHARDSON_FACTOR == 256.0 / 255.0


def test_reference_state_defaults():
    st_ = ReferenceState(np.array([1.0, 0.0]))
    np.testing.assert_array_equal(st_.delta8, [0.0, 0.0])


def test_reference_step_zero_rhs():
    y = np.array([0.5, 0.25])
    y8, eps = reference_step(RK8, lambda t, y: np.zeros(2), 0.0, y, 0.1)
    np.testing.assert_array_equal(y8, y)
    np.testing.assert_array_equal(eps, [0.0, 0.0])


def test_reference_step_constant_rhs():
    _, eps = reference_step(RK8, lambda t, y: np.array([0.5, -2.0]), 0.0, np.zeros(2), 0.25)
    np.testing.assert_array_equal(eps, [0.0, 0.0])


def test_reference_step_keeps_half_steps():
    rhs = harmonic_problem().rhs
    y = np.array([1.0, 0.0])
    y8, _ = reference_step(RK8, rhs, 0.0, y, 0.4)
    expect = rk_step(RK8, rhs, 0.2, rk_step(RK8, rhs, 0.0, y, 0.2), 0.2)
    assert y8.tobytes() == expect.tobytes()


def test_eps8_double_precision_against_rotation():
    h = 0.05
    rhs = harmonic_problem().rhs
    _, eps = reference_step(RK8, rhs, 0.0, np.array([1.0, 0.0]), h)
    full = rk_step(RK8, rhs, 0.0, np.array([1.0, 0.0]), h)
    mpmath.mp.dps = 40
    exact = rotation(mpmath.mpf(1), mpmath.mpf(0), mpmath.mpf(h))
    true = max(abs(mpmath.mpf(float(full[k])) - exact[k]) for k in range(2))
    ratio = float(np.max(np.abs(eps)) / true)
    assert 0.5 <= ratio <= 2.0


def test_eps8_extended_precision_against_rotation(rk8_mp):
    h = mpmath.mpf("0.05")
    y0 = np.array([mpmath.mpf(1), mpmath.mpf(0)], dtype=object)
    _, eps = reference_step(rk8_mp, mp_harmonic, 0, y0, h)
    full = rk_step(rk8_mp, mp_harmonic, 0, y0, h)
    exact = rotation(y0[0], y0[1], h)
    for k in range(2):
        true = abs(full[k] - exact[k])
        assert 0.5 <= abs(eps[k]) / true <= 2.0


def test_eps8_scales_as_ninth_power(rk8_mp):
    y0 = np.array([mpmath.mpf(1), mpmath.mpf(0)], dtype=object)
    norms = []
    for h in ("0.4", "0.2", "0.1"):
        _, eps = reference_step(rk8_mp, mp_harmonic, 0, y0, mpmath.mpf(h))
        norms.append(max(abs(e) for e in eps))
    for big, little in zip(norms, norms[1:]):
        assert float(big / little) == pytest.approx(2**9, rel=0.2)


def test_eps8_scaling_in_double_above_rounding():
    rhs = harmonic_problem().rhs
    y = np.array([1.0, 0.0])
    n1 = np.max(np.abs(reference_step(RK8, rhs, 0.0, y, 0.4)[1]))
    n2 = np.max(np.abs(reference_step(RK8, rhs, 0.0, y, 0.2)[1]))
    assert n1 / n2 == pytest.approx(2**9, rel=0.2)


def test_propagate_first_step():
    np.testing.assert_array_equal(
        propagate_global_error([0.0, 0.0], [3e-12, -1e-12], 0.05, np.eye(2)), [3e-12, -1e-12])


def test_propagate_zero_jacobian():
    out = propagate_global_error([1e-9, 2e-9], [1e-12, 0.0], 0.05, np.zeros((2, 2)))
    np.testing.assert_allclose(out, [1e-9 + 1e-12, 2e-9], rtol=1e-15)


def test_propagate_rotation_generator():
    out = propagate_global_error([1e-9, 0.0], [0.0, 0.0], 0.05, [[0.0, 1.0], [-1.0, 0.0]])
    np.testing.assert_allclose(out, [1e-9, -5e-11], rtol=1e-14)


@settings(max_examples=100)
@given(d0=small, d1=small, e0=small, e1=small, h=st.floats(1e-3, 0.5),
       j=st.lists(st.floats(-3, 3), min_size=4, max_size=4))
def test_propagate_linear(d0, d1, e0, e1, h, j):
    jac = np.reshape(j, (2, 2))
    once = propagate_global_error([d0, d1], [e0, e1], h, jac)
    twice = propagate_global_error([2 * d0, 2 * d1], [2 * e0, 2 * e1], h, jac)
    np.testing.assert_array_equal(twice, 2 * once)


def test_guard():
    assert reference_error_guard([1.86e-12, 1e-12], 1e-6)
    assert reference_error_guard([0.0, 0.0], 1e-9)
    assert not reference_error_guard([2e-9, 0.0], 1e-6)
    assert reference_error_guard([1e-9, 0.0], 1e-6)
