"""RK34Q8 driver: adaptive RK3/RK4 stepping, node-synchronised RK8 reference,
global-error estimation of the working solution and quenching."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import _pyloop
from .controller import ToleranceSpec
from .problem import IvpProblem
from .tableau import get_tableau
from .tracker import reference_error_guard

try:
    from . import _core
except ImportError:  # extension not built
    _core = None

COMPILED_AVAILABLE = _core is not None


class IntegrationError(RuntimeError):
    """Run aborted; ``trajectory`` holds the nodes accepted before the abort."""

    def __init__(self, message: str, trajectory: Optional["Trajectory"] = None):
        super().__init__(message)
        self.trajectory = trajectory


class StepsizeUnderflow(IntegrationError):
    pass


class MaxStepsExceeded(IntegrationError):
    pass


class StepFailed(IntegrationError):
    pass


class ReferenceGuardWarning(RuntimeWarning):
    pass


_ERRORS = {_pyloop.UNDERFLOW: StepsizeUnderflow, _pyloop.MAX_STEPS: MaxStepsExceeded,
           _pyloop.STEP_FAILED: StepFailed}


@dataclass(frozen=True)
class RunConfig:
    t_end: float
    tolerance: ToleranceSpec = field(default_factory=ToleranceSpec)
    h0: float = 0.01
    h_min: float = 1e-12
    quench_enabled: bool = True
    max_steps: int = 10_000_000
    subsample: int = 1

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        if not (self.h0 > 0 and self.h_min > 0):
            raise ValueError("h0 and h_min must be positive")
        if self.subsample < 1:
            raise ValueError("subsample must be at least 1")


@dataclass(frozen=True)
class NodeRecord:
    i: int
    t: float
    h: float
    y34: np.ndarray
    y8: np.ndarray
    global_error_est: np.ndarray
    eps8: np.ndarray
    delta8: np.ndarray
    quenched: bool
    H34: float
    H8: float


@dataclass
class Trajectory:
    """Columnar store of the accepted nodes.

    ``y34``, ``y8``, ``eps8``, ``delta8`` have shape (nodes, dim); ``tol`` is
    the per-node tolerance used for the step that reached the node.
    """

    t: np.ndarray
    h: np.ndarray
    y34: np.ndarray
    y8: np.ndarray
    eps8: np.ndarray
    delta8: np.ndarray
    quenched: np.ndarray
    tol: np.ndarray
    H34: np.ndarray
    H8: np.ndarray
    h_exact: float
    backend: str = "python"
    summary: dict = field(default_factory=dict)

    @property
    def global_error_est(self) -> np.ndarray:
        return self.y34 - self.y8

    def __len__(self) -> int:
        return len(self.t)

    def node(self, i: int) -> NodeRecord:
        return NodeRecord(
            i=i, t=float(self.t[i]), h=float(self.h[i]), y34=self.y34[i], y8=self.y8[i],
            global_error_est=self.y34[i] - self.y8[i], eps8=self.eps8[i],
            delta8=self.delta8[i], quenched=bool(self.quenched[i]),
            H34=float(self.H34[i]), H8=float(self.H8[i]),
        )

    @property
    def nodes(self) -> list[NodeRecord]:
        return [self.node(i) for i in range(len(self))]


def quench_decision(global_error_est, delta: float) -> bool:
    """Quench iff the max-norm error estimate strictly exceeds ``delta``."""
    return float(np.max(np.abs(global_error_est))) > delta


def _energy(problem, y):
    ham = getattr(problem, "hamiltonian", None)
    if ham is None:
        return np.full(len(y), np.nan)
    return np.asarray(ham(y[:, 1], y[:, 0]), dtype=float)


def _summarise(traj: Trajectory) -> dict:
    gerr = np.abs(traj.global_error_est)
    guard = [reference_error_guard(d, tol) for d, tol in zip(traj.delta8, traj.tol)]
    return {
        "nodes": len(traj),
        "quenches": int(np.count_nonzero(traj.quenched)),
        "max_gerr_q": float(gerr[:, 0].max()),
        "max_gerr_p": float(gerr[:, 1].max()) if gerr.shape[1] > 1 else 0.0,
        "max_traj_err": float(np.hypot.reduce(gerr, axis=1).max()),
        "max_H_err": float(np.nanmax(np.abs(traj.H34 - traj.h_exact), initial=0.0)),
        "max_delta8": float(np.abs(traj.delta8).max()),
        "reference_guard_ok": bool(all(guard)),
    }


def _assemble(problem, rows: np.ndarray, backend: str) -> Trajectory:
    n = problem.dimension
    y34 = rows[:, 2:2 + n]
    y8 = rows[:, 2 + n:2 + 2 * n]
    eps8 = rows[:, 2 + 2 * n:2 + 3 * n]
    delta8 = rows[:, 2 + 3 * n:2 + 4 * n]
    ham = getattr(problem, "hamiltonian", None)
    traj = Trajectory(
        t=rows[:, 0], h=rows[:, 1], y34=y34, y8=y8, eps8=eps8, delta8=delta8,
        quenched=rows[:, 2 + 4 * n].astype(bool), tol=rows[:, 3 + 4 * n],
        H34=_energy(problem, y34), H8=_energy(problem, y8),
        h_exact=problem.h_exact if ham is not None else float("nan"),
        backend=backend,
    )
    traj.summary = _summarise(traj)
    return traj


def select_backend(problem, backend: str = "auto") -> str:
    """'compiled' when the kernel is built and the problem has one, else 'python'."""
    kernel = getattr(problem, "kernel", None)
    if backend == "auto":
        return "compiled" if COMPILED_AVAILABLE and kernel is not None else "python"
    if backend == "compiled":
        if not COMPILED_AVAILABLE:
            raise RuntimeError("compiled kernel is not built")
        if kernel is None:
            raise ValueError(f"problem {problem.name!r} has no compiled kernel")
    elif backend != "python":
        raise ValueError(f"unknown backend {backend!r}")
    return backend


def integrate(problem: IvpProblem, config: RunConfig, backend: str = "auto",
              tableaus: tuple = ("rk3", "rk4", "rk8")) -> Trajectory:
    """Run RK34Q8 (or plain RK34 when ``config.quench_enabled`` is false).

    Raises an ``IntegrationError`` subclass on abort. A reference solution
    whose own error estimate is not negligible against the tolerance only
    triggers a ``ReferenceGuardWarning``.
    """
    if not config.t_end >= problem.t0:
        raise ValueError("t_end must not precede the initial time")
    rk3, rk4, rk8 = (get_tableau(t) if isinstance(t, str) else t for t in tableaus)
    which = select_backend(problem, backend)
    spec = config.tolerance
    args = (float(config.t_end), spec, float(config.h0), float(config.h_min),
            bool(config.quench_enabled), int(config.max_steps), rk3, rk4, rk8)
    if which == "compiled":
        status, msg, rows = _core.run_loop(
            problem.kernel, float(problem.t0), problem.y0, args[0], spec.delta_abs,
            spec.delta_rel, *args[2:])
    else:
        status, msg, rows = _pyloop.run_loop(problem, *args)
    traj = _assemble(problem, rows, which)
    if status != _pyloop.OK:
        raise _ERRORS[status](msg, traj)
    if not traj.summary["reference_guard_ok"]:
        warnings.warn(
            f"reference error estimate {traj.summary['max_delta8']:.3g} is not negligible "
            "against the tolerance", ReferenceGuardWarning, stacklevel=2)
    return traj


def integrate_unquenched(problem: IvpProblem, config: RunConfig, **kwargs) -> Trajectory:
    """Local extrapolation with RK3/RK4 only; global errors accumulate freely."""
    return integrate(problem, replace(config, quench_enabled=False), **kwargs)
