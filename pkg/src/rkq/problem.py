"""Initial-value problems, the Hamiltonian problem type and built-in test problems."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


def fd_jacobian(rhs, t: float, y) -> np.ndarray:
    """Central-difference Jacobian with step max(1e-6, 1e-6*|y_j|)."""
    y = np.asarray(y, dtype=float)
    n = len(y)
    jac = np.empty((n, n))
    for j in range(n):
        step = max(1e-6, 1e-6 * abs(y[j]))
        yp = y.copy()
        ym = y.copy()
        yp[j] += step
        ym[j] -= step
        jac[:, j] = (np.asarray(rhs(t, yp)) - np.asarray(rhs(t, ym))) / (2 * step)
    return jac


@dataclass(frozen=True)
class IvpProblem:
    rhs: Callable[[float, np.ndarray], np.ndarray]
    t0: float
    y0: np.ndarray
    jacobian: Optional[Callable[[float, np.ndarray], np.ndarray]] = None
    exact_solution: Optional[Callable[[float], np.ndarray]] = None
    name: str = "ivp"

    def __post_init__(self):
        y0 = np.array(self.y0, dtype=float)
        y0.setflags(write=False)
        object.__setattr__(self, "y0", y0)
        if not np.all(np.isfinite(np.asarray(self.rhs(self.t0, y0)))):
            raise ValueError(f"{self.name}: rhs is not finite at the initial state")

    @property
    def dimension(self) -> int:
        return len(self.y0)

    def jac(self, t: float, y) -> np.ndarray:
        if self.jacobian is not None:
            return np.asarray(self.jacobian(t, y), dtype=float)
        return fd_jacobian(self.rhs, t, y)


@dataclass(frozen=True)
class HamiltonianProblem(IvpProblem):
    """Two-dimensional Hamiltonian system with state ordered (q, p).

    ``hamiltonian`` takes ``(p, q)`` and must accept numpy arrays.
    ``kernel`` names a compiled right-hand side implementing the same system;
    leave it ``None`` for user-defined problems.
    """

    hamiltonian: Callable = None
    kernel: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        super().__post_init__()
        if self.dimension != 2:
            raise ValueError("HamiltonianProblem state must be (q, p)")
        if self.hamiltonian is None:
            raise ValueError("HamiltonianProblem needs a hamiltonian")

    @property
    def h_exact(self) -> float:
        q0, p0 = self.y0
        return float(self.hamiltonian(p0, q0))

    def energy(self, y) -> float:
        q, p = y
        return float(self.hamiltonian(p, q))


def _pendulum_rhs(t, y):
    q, p = y
    return np.array([p + math.cos(q) / 6.0, (p / 6.0 - 1.0) * math.sin(q)])


def _pendulum_jac(t, y):
    q, p = y
    s, c = math.sin(q), math.cos(q)
    return np.array([[-s / 6.0, 1.0], [(p / 6.0 - 1.0) * c, s / 6.0]])


def _pendulum_h(p, q):
    return p * p / 2.0 - (1.0 - p / 6.0) * np.cos(q)


def pendulum_problem() -> HamiltonianProblem:
    """H = p^2/2 - (1 - p/6) cos q, starting from q = arccos(-0.8), p = 0."""
    return HamiltonianProblem(
        rhs=_pendulum_rhs,
        t0=0.0,
        y0=np.array([math.acos(-0.8), 0.0]),
        jacobian=_pendulum_jac,
        name="pendulum",
        hamiltonian=_pendulum_h,
        kernel="pendulum",
    )


def _harmonic_rhs(t, y):
    q, p = y
    return np.array([p, -q])


def _harmonic_jac(t, y):
    return np.array([[0.0, 1.0], [-1.0, 0.0]])


def _harmonic_exact(t):
    return np.array([math.cos(t), -math.sin(t)])


def _harmonic_h(p, q):
    return (p * p + q * q) / 2.0


def harmonic_problem() -> HamiltonianProblem:
    return HamiltonianProblem(
        rhs=_harmonic_rhs,
        t0=0.0,
        y0=np.array([1.0, 0.0]),
        jacobian=_harmonic_jac,
        exact_solution=_harmonic_exact,
        name="harmonic",
        hamiltonian=_harmonic_h,
        kernel="harmonic",
    )


PROBLEMS = {"pendulum": pendulum_problem, "harmonic": harmonic_problem}


def get_problem(name: str) -> HamiltonianProblem:
    try:
        return PROBLEMS[name]()
    except KeyError:
        raise KeyError(f"unknown problem {name!r}") from None


def eval_hamiltonian_error(prob: HamiltonianProblem, y) -> float:
    """|H(p, q) - H(p0, q0)| for the state y = (q, p)."""
    return abs(prob.energy(y) - prob.h_exact)
