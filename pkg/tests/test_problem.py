import math

import numpy as np
import pytest

from oracles import central_jacobian
from rkq.problem import (HamiltonianProblem, IvpProblem, eval_hamiltonian_error, fd_jacobian,
                         get_problem, harmonic_problem, pendulum_problem)

Q0 = math.acos(-0.8)


def random_states(n=100, seed=7):
    rng = np.random.default_rng(seed)
    return np.column_stack([rng.uniform(-math.pi, math.pi, n), rng.uniform(-2, 2, n)])


def test_pendulum_energy():
    prob = pendulum_problem()
    assert prob.hamiltonian(0.0, Q0) == pytest.approx(0.8, abs=1e-15)
    assert prob.h_exact == pytest.approx(0.8, abs=1e-15)
    assert prob.y0[0] == Q0 and prob.y0[1] == 0.0


def test_pendulum_rhs_at_start():
    f = pendulum_problem().rhs(0.0, np.array([Q0, 0.0]))
    np.testing.assert_allclose(f, [-0.8 / 6, -0.6], atol=1e-15)


def test_pendulum_jacobian_at_start():
    prob = pendulum_problem()
    fd = central_jacobian(lambda y: list(prob.rhs(0.0, np.array(y))), [Q0, 0.0])
    np.testing.assert_allclose(fd, [[-0.1, 1.0], [0.8, 0.1]], atol=1e-9)
    np.testing.assert_allclose(prob.jac(0.0, np.array([Q0, 0.0])), fd, atol=1e-6)


def test_harmonic():
    prob = harmonic_problem()
    np.testing.assert_array_equal(prob.rhs(0.0, np.array([0.0, 1.0])), [1.0, 0.0])
    np.testing.assert_array_equal(prob.jac(0.0, np.array([0.4, -3.0])), [[0, 1], [-1, 0]])
    np.testing.assert_allclose(prob.exact_solution(math.pi), [-1.0, 0.0], atol=1e-15)
    assert prob.h_exact == 0.5


@pytest.mark.parametrize("factory", [pendulum_problem, harmonic_problem])
def test_jacobian_matches_finite_differences(factory):
    prob = factory()
    for y in random_states():
        fd = central_jacobian(lambda v: list(prob.rhs(0.0, np.array(v))), list(y))
        np.testing.assert_allclose(prob.jac(0.0, y), fd, atol=1e-6)


@pytest.mark.parametrize("factory", [pendulum_problem, harmonic_problem])
def test_rhs_is_hamiltonian_gradient(factory):
    prob = factory()
    s = 1e-5
    for q, p in random_states():
        dh_dp = (prob.hamiltonian(p + s, q) - prob.hamiltonian(p - s, q)) / (2 * s)
        dh_dq = (prob.hamiltonian(p, q + s) - prob.hamiltonian(p, q - s)) / (2 * s)
        np.testing.assert_allclose(prob.rhs(0.0, np.array([q, p])), [dh_dp, -dh_dq], atol=1e-6)


@pytest.mark.parametrize("factory", [pendulum_problem, harmonic_problem])
def test_energy_constant_along_flow(factory):
    prob = factory()
    s = 1e-6
    for y in random_states():
        f = prob.rhs(0.0, y)
        up, down = y + s * f, y - s * f
        dhdt = (prob.energy(up) - prob.energy(down)) / (2 * s)
        assert abs(dhdt) <= 1e-8


def test_eval_hamiltonian_error():
    pend, harm = pendulum_problem(), harmonic_problem()
    assert eval_hamiltonian_error(pend, pend.y0) == 0.0
    assert eval_hamiltonian_error(pend, np.array([math.pi / 2, 0.0])) == pytest.approx(0.8)
    assert eval_hamiltonian_error(harm, np.array([0.6, 0.8])) == pytest.approx(0.0, abs=1e-15)


def test_fd_jacobian_fallback():
    prob = IvpProblem(rhs=lambda t, y: np.array([y[0] * y[1], math.sin(y[0])]), t0=0.0,
                      y0=np.array([0.3, 2.0]))
    y = np.array([0.3, 2.0])
    np.testing.assert_allclose(prob.jac(0.0, y), [[2.0, 0.3], [math.cos(0.3), 0.0]], atol=1e-8)
    np.testing.assert_allclose(fd_jacobian(prob.rhs, 0.0, y), prob.jac(0.0, y))


def test_problem_validation():
    with pytest.raises(ValueError):
        IvpProblem(rhs=lambda t, y: np.array([np.nan]), t0=0.0, y0=np.array([1.0]))
    with pytest.raises(ValueError):
        HamiltonianProblem(rhs=lambda t, y: y, t0=0.0, y0=np.array([1.0, 2.0, 3.0]),
                           hamiltonian=lambda p, q: p)
    with pytest.raises(KeyError):
        get_problem("nosuch")
    with pytest.raises(ValueError):
        pendulum_problem().y0[0] = 1.0
