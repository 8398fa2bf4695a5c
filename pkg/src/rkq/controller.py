"""RK3/RK4 local-extrapolation pair, stepsize adaptation and the per-node tolerance."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .tableau import ButcherTableau, rk_step

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0
ERR_FLOOR = 1e-300


@dataclass(frozen=True)
class ToleranceSpec:
    delta_abs: float = 1e-6
    delta_rel: float = 0.0

    def __post_init__(self):
        if not self.delta_abs > 0:
            raise ValueError("delta_abs must be positive")
        if not self.delta_rel >= 0:
            raise ValueError("delta_rel must be non-negative")

    @property
    def mode(self) -> str:
        return "absolute" if self.delta_rel == 0 else "relative"


def tolerance_at(y, spec: ToleranceSpec) -> float:
    """Absolute mode gives delta_abs; relative mode gives
    min_i max(delta_abs, delta_rel*|y_i|)."""
    if spec.delta_rel == 0:
        return spec.delta_abs
    return min(max(spec.delta_abs, spec.delta_rel * abs(float(v))) for v in y)


@dataclass
class StepAttempt:
    y_low: np.ndarray
    y_high: np.ndarray
    local_error_estimate: np.ndarray
    h_used: float
    accepted: Optional[bool] = None
    h_next: Optional[float] = None

    @property
    def error_norm(self) -> float:
        return float(np.max(self.local_error_estimate))


def pair_step(rk3: ButcherTableau, rk4: ButcherTableau, rhs, t: float, y, h: float) -> StepAttempt:
    y_low = rk_step(rk3, rhs, t, y, h)
    y_high = rk_step(rk4, rhs, t, y, h)
    return StepAttempt(y_low, y_high, np.abs(y_high - y_low), h)


def step_factor(err: float, delta: float, r: int = 3) -> float:
    err = max(float(err), ERR_FLOOR)
    fac = SAFETY * (delta / err) ** (1.0 / (r + 1))
    return min(MAX_FACTOR, max(MIN_FACTOR, fac))


def adapt_step(attempt: StepAttempt, delta: float, r: int = 3) -> tuple[bool, float]:
    """Accept iff the max-norm error estimate is within ``delta``; propose the next h.

    Fills ``attempt.accepted``/``attempt.h_next`` as a side effect.
    """
    err = attempt.error_norm
    accepted = err <= delta
    h_next = attempt.h_used * step_factor(err, delta, r)
    attempt.accepted, attempt.h_next = accepted, h_next
    return accepted, h_next
