"""High-order reference solution and its global-error bookkeeping.

The reference is advanced with two half steps of the order-8 method; the
difference from a single full step gives a Richardson estimate of the full
step's local error, which is then pushed through the linearised error
recursion ``D_{i+1} = eps_{i+1} + (I + h J) D_i``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tableau import ButcherTableau, rk_step

REFERENCE_ORDER = 8
RICHARDSON_FACTOR = 2.0**REFERENCE_ORDER / (2.0**REFERENCE_ORDER - 1.0)


@dataclass
class ReferenceState:
    y8: np.ndarray
    delta8: np.ndarray = None
    eps8_last: np.ndarray = None

    def __post_init__(self):
        n = len(self.y8)
        if self.delta8 is None:
            self.delta8 = np.zeros(n)
        if self.eps8_last is None:
            self.eps8_last = np.zeros(n)


def reference_step(rk8: ButcherTableau, rhs, t: float, y8, h: float):
    """Return ``(y_half, eps8)``: the two-half-step value and the estimated
    local error of the single full step."""
    y_full = rk_step(rk8, rhs, t, y8, h)
    half = h / 2
    y_mid = rk_step(rk8, rhs, t, y8, half)
    y_half = rk_step(rk8, rhs, t + half, y_mid, half)
    return y_half, (y_half - y_full) * RICHARDSON_FACTOR


def propagate_global_error(delta_prev, eps, h: float, jac) -> np.ndarray:
    """eps + (I + h*jac) @ delta_prev.

    The matrix-vector product is summed row by row in column order so the
    result does not depend on BLAS.
    """
    delta_prev = np.asarray(delta_prev, dtype=float)
    m = np.eye(len(delta_prev)) + h * np.asarray(jac, dtype=float)
    prod = m[:, 0] * delta_prev[0]
    for j in range(1, len(delta_prev)):
        prod = prod + m[:, j] * delta_prev[j]
    return np.asarray(eps, dtype=float) + prod


def reference_error_guard(delta8, delta: float, margin: float = 1e-3) -> bool:
    """True when the reference's own error estimate is negligible next to ``delta``."""
    return float(np.max(np.abs(delta8))) <= margin * delta
