"""Butcher tableaus, the generic explicit Runge-Kutta step, and order checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

Rhs = Callable[[float, np.ndarray], np.ndarray]


class StepFailure(ArithmeticError):
    """A stage derivative came back non-finite."""

    def __init__(self, stage: int, t: float):
        super().__init__(f"non-finite derivative at stage {stage} (t={t!r})")
        self.stage = stage
        self.t = t


class OrderNotMeasurable(ValueError):
    pass


@dataclass(frozen=True)
class ButcherTableau:
    name: str
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    declared_order: int

    def __post_init__(self):
        s = len(self.b)
        if self.a.shape != (s, s) or self.c.shape != (s,):
            raise ValueError(f"{self.name}: inconsistent tableau shapes")
        if np.any(np.triu(self.a) != 0):
            raise ValueError(f"{self.name}: a must be strictly lower triangular")

    @property
    def stage_count(self) -> int:
        return len(self.b)

    def check(self, tol: float = 1e-14) -> None:
        """Raise ValueError unless sum(b) == 1 and c equals the row sums of a."""
        a = self.a.astype(float)
        if abs(float(np.sum(self.b.astype(float))) - 1.0) > tol:
            raise ValueError(f"{self.name}: weights do not sum to one")
        if np.max(np.abs(a.sum(axis=1) - self.c.astype(float))) > tol:
            raise ValueError(f"{self.name}: c is not the row sum of a")


def _tableau(name, order, a_rows, b, c, number=float):
    s = len(b)
    a = np.zeros((s, s), dtype=object if number is not float else float)
    for i, row in enumerate(a_rows, start=1):
        for j, v in enumerate(row):
            a[i, j] = v
    if number is not float:
        a[a == 0] = number(0)
    dtype = a.dtype
    return ButcherTableau(name, a, np.array(b, dtype=dtype), np.array(c, dtype=dtype), order)


def euler() -> ButcherTableau:
    return _tableau("euler", 1, [], [1.0], [0.0])


def kutta3() -> ButcherTableau:
    # Kutta (1901) third-order method
    return _tableau(
        "rk3", 3,
        [[0.5], [-1.0, 2.0]],
        [1 / 6, 2 / 3, 1 / 6],
        [0.0, 0.5, 1.0],
    )


def classical_rk4() -> ButcherTableau:
    return _tableau(
        "rk4", 4,
        [[0.5], [0.0, 0.5], [0.0, 0.0, 1.0]],
        [1 / 6, 1 / 3, 1 / 3, 1 / 6],
        [0.0, 0.5, 0.5, 1.0],
    )


# Cooper & Verner (1972), SIAM J. Numer. Anal. 9(3), 389-405: the 11-stage
# eighth-order method as reproduced in Butcher, "Numerical Methods for ODEs".
# Each entry (u, v, d) stands for (u + v*sqrt(21)) / d.
_CV8_A = [
    [(1, 0, 2)],
    [(1, 0, 4), (1, 0, 4)],
    [(1, 0, 7), (-7, -3, 98), (21, 5, 49)],
    [(11, 1, 84), (0, 0, 1), (18, 4, 63), (21, -1, 252)],
    [(5, 1, 48), (0, 0, 1), (9, 1, 36), (-231, 14, 360), (63, -7, 80)],
    [(10, -1, 42), (0, 0, 1), (-432, 92, 315), (633, -145, 90), (-504, 115, 70),
     (63, -13, 35)],
    [(1, 0, 14), (0, 0, 1), (0, 0, 1), (0, 0, 1), (14, -3, 126), (13, -3, 63),
     (1, 0, 9)],
    [(1, 0, 32), (0, 0, 1), (0, 0, 1), (0, 0, 1), (91, -21, 576), (11, 0, 72),
     (-385, -75, 1152), (63, 13, 128)],
    [(1, 0, 14), (0, 0, 1), (0, 0, 1), (0, 0, 1), (1, 0, 9), (-733, -147, 2205),
     (515, 111, 504), (-51, -11, 56), (132, 28, 245)],
    [(0, 0, 1), (0, 0, 1), (0, 0, 1), (0, 0, 1), (-42, 7, 18), (-18, 28, 45),
     (-273, -53, 72), (301, 53, 72), (28, -28, 45), (49, -7, 18)],
]
# 5-point Lobatto weights on the nodes 0, (7-s)/14, 1/2, (7+s)/14, 1
_CV8_B = [(1, 0, 20)] + [(0, 0, 1)] * 6 + [(49, 0, 180), (16, 0, 45), (49, 0, 180),
                                          (1, 0, 20)]
_CV8_C = [(0, 0, 1), (1, 0, 2), (1, 0, 2), (7, 1, 14), (7, 1, 14), (1, 0, 2),
          (7, -1, 14), (7, -1, 14), (1, 0, 2), (7, 1, 14), (1, 0, 1)]


def cooper_verner8(number: Callable = float, sqrt: Callable = math.sqrt) -> ButcherTableau:
    """Cooper-Verner order-8 tableau evaluated in the arithmetic given by
    ``number``/``sqrt`` (plain doubles by default, e.g. ``mpmath.mpf`` for
    extended precision)."""
    s = sqrt(number(21))

    def ev(e):
        u, v, d = e
        return (number(u) + number(v) * s) / number(d)

    return _tableau(
        "rk8", 8,
        [[ev(e) for e in row] for row in _CV8_A],
        [ev(e) for e in _CV8_B],
        [ev(e) for e in _CV8_C],
        number=number,
    )


def builtin_tableaus() -> dict[str, ButcherTableau]:
    return {t.name: t for t in (euler(), kutta3(), classical_rk4(), cooper_verner8())}


def get_tableau(name: str) -> ButcherTableau:
    try:
        return builtin_tableaus()[name.lower()]
    except KeyError:
        raise KeyError(f"unknown tableau {name!r}") from None


def rk_step(tableau: ButcherTableau, rhs: Rhs, t: float, y, h: float) -> np.ndarray:
    """Advance ``y`` by one explicit RK step of size ``h``.

    Stage sums are accumulated left to right in index order; the engine's
    compiled kernel relies on reproducing this ordering exactly.
    """
    y = np.asarray(y)
    a, b, c = tableau.a, tableau.b, tableau.c
    k = []
    for i in range(tableau.stage_count):
        acc = y * 0
        for j in range(i):
            acc = acc + a[i, j] * k[j]
        ki = np.asarray(rhs(t + c[i] * h, y + h * acc))
        if ki.dtype != object and not np.all(np.isfinite(ki)):
            raise StepFailure(i, t)
        k.append(ki)
    incr = y * 0
    for j in range(tableau.stage_count):
        incr = incr + b[j] * k[j]
    return y + h * incr


def fixed_step_solve(tableau: ButcherTableau, rhs: Rhs, t0: float, y0, t_end: float,
                     n_steps: int) -> np.ndarray:
    h = (t_end - t0) / n_steps
    y = np.asarray(y0, dtype=float)
    for i in range(n_steps):
        y = rk_step(tableau, rhs, t0 + i * h, y, h)
    return y


def empirical_order(tableau: ButcherTableau, problem, h_sequence: Sequence[float],
                    t_end: float = 1.0) -> float:
    """Least-squares slope of log(global error at ``t_end``) against log(h).

    ``problem`` needs ``rhs``, ``t0``, ``y0`` and ``exact_solution``; every h
    must divide the interval into a whole number of steps.
    """
    if problem.exact_solution is None:
        raise ValueError("empirical_order needs a problem with an exact solution")
    hs = np.asarray(h_sequence, dtype=float)
    if len(hs) < 4:
        raise ValueError("need at least four stepsizes")
    if np.any(np.diff(hs) >= 0):
        raise ValueError("h_sequence must be decreasing")
    span = t_end - problem.t0
    exact = np.asarray(problem.exact_solution(t_end), dtype=float)
    errors = []
    for h in hs:
        n = int(round(span / h))
        if n < 1 or abs(n * h - span) > 1e-12 * max(1.0, abs(span)):
            raise ValueError(f"h={h} does not divide the interval")
        y = fixed_step_solve(tableau, problem.rhs, problem.t0, problem.y0, t_end, n)
        errors.append(float(np.max(np.abs(y - exact))))
    if errors[0] < 100 * np.finfo(float).eps:
        raise OrderNotMeasurable(
            f"{tableau.name}: error {errors[0]:.3g} at the largest h is at the rounding floor")
    slope, _ = np.polyfit(np.log(hs), np.log(errors), 1)
    return float(slope)
