"""Post-run error diagnostics for Hamiltonian trajectories.

The exact solution is not available, so the RK8 reference stands in for it;
this is sound while the reference's own error estimate (delta8) stays well
below the tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SECOND_ORDER_SLACK = 100.0


def hamiltonian_bound(problem, y8, delta: float) -> float:
    """(|dq/dt| + |dp/dt|) * delta, with the derivatives taken at ``y8``."""
    f = np.asarray(problem.rhs(0.0, np.asarray(y8, dtype=float)), dtype=float)
    return float(np.sum(np.abs(f)) * delta)


def trajectory_error(y34, y8) -> float:
    """Euclidean phase-space distance between the working and reference states."""
    diff = np.asarray(y34, dtype=float) - np.asarray(y8, dtype=float)
    return math.hypot(*diff)


@dataclass
class DiagnosticsReport:
    hamiltonian_error: np.ndarray
    hamiltonian_bound: np.ndarray
    trajectory_error: np.ndarray
    componentwise_error: np.ndarray
    max_trajectory_error: float
    max_hamiltonian_error: float
    bound_violations: int
    local_bound_violations: int

    def as_dict(self) -> dict:
        return {
            "max_traj_err": self.max_trajectory_error,
            "max_H_err": self.max_hamiltonian_error,
            "max_gerr_q": float(self.componentwise_error[:, 0].max()),
            "max_gerr_p": float(self.componentwise_error[:, 1].max()),
            "bound_violations": self.bound_violations,
            "local_bound_violations": self.local_bound_violations,
        }


def _speed(problem, y):
    return np.array([np.sum(np.abs(problem.rhs(0.0, row))) for row in y])


def diagnose(traj, problem, delta=None) -> DiagnosticsReport:
    """Per-node Hamiltonian error, its first-order bound and the trajectory error.

    ``delta`` is a scalar or per-node tolerance series (defaults to the
    trajectory's own). Two violation counts are reported:

    * ``bound_violations``: |H(y34) - H0| > (|q'|+|p'|)*delta + C*delta**2
    * ``local_bound_violations``: |H(y34) - H(y8)| > (|q'|+|p'|)*e + C*e**2
      with e the node's max-norm deviation from the reference.
    """
    tol = traj.tol if delta is None else np.broadcast_to(np.asarray(delta, float), traj.t.shape)
    diff = traj.y34 - traj.y8
    speed = _speed(problem, traj.y8)
    h_err = np.abs(traj.H34 - traj.h_exact)
    bound = speed * tol
    traj_err = np.hypot.reduce(diff, axis=1)
    viol = int(np.count_nonzero(h_err > bound + SECOND_ORDER_SLACK * tol**2))
    e = np.max(np.abs(diff), axis=1)
    local = np.abs(traj.H34 - traj.H8)
    local_viol = int(np.count_nonzero(local > speed * e + SECOND_ORDER_SLACK * e**2))
    return DiagnosticsReport(
        hamiltonian_error=h_err,
        hamiltonian_bound=bound,
        trajectory_error=traj_err,
        componentwise_error=np.abs(diff),
        max_trajectory_error=float(traj_err.max()),
        max_hamiltonian_error=float(h_err.max()),
        bound_violations=viol,
        local_bound_violations=local_viol,
    )


def drift_windows(traj, windows: int = 10) -> np.ndarray:
    """Mean of H34 - H0 over equal-count windows of nodes."""
    return np.array([w.mean() for w in np.array_split(traj.H34 - traj.h_exact, windows)])
