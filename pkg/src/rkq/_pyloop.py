"""Pure-Python RK34Q8 loop, assembled from the module-level operations.

Used for user-defined problems and whenever the compiled kernel is missing.
Arithmetic is ordered exactly like ``_core.pyx`` so both backends produce
bit-identical columns on the built-in problems.
"""

import numpy as np

from .controller import adapt_step, pair_step, tolerance_at
from .tableau import StepFailure
from .tracker import propagate_global_error, reference_step


def _quench_decision(est, delta):
    from .engine import quench_decision
    return quench_decision(est, delta)

OK, UNDERFLOW, MAX_STEPS, STEP_FAILED = 0, 1, 2, 3
NCOLS = 12  # t h q34 p34 q8 p8 eps8_q eps8_p delta8_q delta8_p quenched tol


class _Rows:
    def __init__(self, n):
        self.n = n
        self.rows = []

    def add(self, t, h, y34, y8, eps8, d8, quenched, tol):
        self.rows.append((t, h, *y34, *y8, *eps8, *d8, float(quenched), tol))

    def array(self):
        return np.array(self.rows, dtype=float).reshape(-1, 4 * self.n + 4)


def run_loop(problem, t_end, tol_spec, h0, h_min, quench, max_steps, rk3, rk4, rk8):
    """Return ``(status, message, rows)``; rows has one entry per accepted node."""
    rhs = problem.rhs
    n = problem.dimension
    t = float(problem.t0)
    y34 = np.array(problem.y0, dtype=float)
    y8 = y34.copy()
    d8 = np.zeros(n)
    rows = _Rows(n)
    rows.add(t, 0.0, y34, y8, np.zeros(n), d8, False, tolerance_at(y34, tol_spec))
    h = float(h0)
    steps = 0
    while t < t_end:
        if steps >= max_steps:
            return MAX_STEPS, f"max_steps={max_steps} reached at t={t!r}", rows.array()
        delta = tolerance_at(y34, tol_spec)
        try:
            while True:
                last = t + h >= t_end
                h_try = t_end - t if last else h
                attempt = pair_step(rk3, rk4, rhs, t, y34, h_try)
                accepted, h_new = adapt_step(attempt, delta)
                if accepted:
                    break
                if h_new < h_min:
                    return (UNDERFLOW, f"stepsize underflow at t={t!r} (h={h_new!r})",
                            rows.array())
                h = h_new
            y8_next, eps8 = reference_step(rk8, rhs, t, y8, h_try)
        except StepFailure as exc:
            return STEP_FAILED, str(exc), rows.array()
        d8 = propagate_global_error(d8, eps8, h_try, problem.jac(t, y8))
        t = t_end if last else t + h_try
        y34 = attempt.y_high
        y8 = y8_next
        quenched = bool(quench) and _quench_decision(y34 - y8, delta)
        if quenched:
            y34 = y8.copy()
        rows.add(t, h_try, y34, y8, eps8, d8, quenched, delta)
        h = h_new
        steps += 1
    return OK, "", rows.array()
