"""Explicit Runge-Kutta integration with stepwise global error control (RK34Q8).

The integration loop runs in a compiled kernel for the built-in problems when
the extension is built, and in pure Python otherwise; see
``rkq.engine.COMPILED_AVAILABLE``.
"""

from .analysis import DiagnosticsReport, diagnose, hamiltonian_bound, trajectory_error
from .controller import StepAttempt, ToleranceSpec, adapt_step, pair_step, tolerance_at
from .engine import (
    COMPILED_AVAILABLE,
    IntegrationError,
    MaxStepsExceeded,
    NodeRecord,
    ReferenceGuardWarning,
    RunConfig,
    StepFailed,
    StepsizeUnderflow,
    Trajectory,
    integrate,
    integrate_unquenched,
    quench_decision,
)
from .problem import (
    HamiltonianProblem,
    IvpProblem,
    eval_hamiltonian_error,
    harmonic_problem,
    pendulum_problem,
)
from .tableau import (
    ButcherTableau,
    OrderNotMeasurable,
    StepFailure,
    builtin_tableaus,
    empirical_order,
    get_tableau,
    rk_step,
)
from .tracker import (
    ReferenceState,
    propagate_global_error,
    reference_error_guard,
    reference_step,
)

__version__ = "0.1.0"
