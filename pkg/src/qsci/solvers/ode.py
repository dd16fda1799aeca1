"""Linear ODEs ``dx/dt = A x + b`` as one clock-indexed linear system."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from ..errors import InputError, PostselectionError
from .linear import LinearSystemProblem, SolveReport, qlsa_chebyshev

CLOCK_FLOOR = 1e-12


@dataclass
class ODEProblem:
    A: np.ndarray
    b: np.ndarray
    x0: np.ndarray
    T: float
    k: int = 4
    m: int = 10
    p: int | None = None

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=complex))
        n = self.A.shape[0]
        if self.A.shape != (n, n):
            raise InputError("A must be square")
        self.b = np.asarray(self.b, dtype=complex).reshape(-1)
        self.x0 = np.asarray(self.x0, dtype=complex).reshape(-1)
        if self.b.size != n or self.x0.size != n:
            raise InputError("b and x0 must match the size of A")
        if self.p is None:
            self.p = self.m
        if self.k < 1 or self.m < 1 or self.p < 1:
            raise InputError("k, m and p must all be at least 1")
        if self.T <= 0:
            raise InputError("horizon T must be positive")
        if np.max(np.linalg.eigvals(self.A).real) > 1e-12:
            warnings.warn("A has eigenvalues with positive real part; the solution may grow", stacklevel=2)

    @property
    def h(self) -> float:
        return self.T / self.m

    @property
    def n(self) -> int:
        return self.A.shape[0]


@dataclass
class ClockSystem:
    """Block-lower-triangular system; ``index_map`` maps block labels to index ranges."""

    matrix: np.ndarray
    rhs: np.ndarray
    index_map: dict

    def solve(self) -> np.ndarray:
        """Classical forward substitution (the matrix is unit lower triangular)."""
        return solve_triangular(self.matrix, self.rhs, lower=True, unit_diagonal=True)

    def block(self, vec, label) -> np.ndarray:
        lo, hi = self.index_map[label]
        return vec[lo:hi]


def ode_clock_build(problem: ODEProblem) -> ClockSystem:
    """Per step ``j``: block ``x_j`` then Taylor blocks ``y_{j,l} = (Ah/l) y_{j,l-1}``
    (``y_{j,1} = Ah x_j + hb``); the next state is ``x_{j+1} = x_j + sum_l y_{j,l}``;
    ``p`` trailing blocks copy ``x_m``.
    """
    n, k, m, p, h = problem.n, problem.k, problem.m, problem.p, problem.h
    Ah = problem.A * h
    nblocks = m * (k + 1) + p
    L = np.eye(nblocks * n, dtype=complex)
    rhs = np.zeros(nblocks * n, dtype=complex)
    index_map = {}

    def sl(block):
        return slice(block * n, (block + 1) * n)

    for j in range(m):
        base = j * (k + 1)
        index_map[f"x{j}"] = (base * n, (base + 1) * n)
        for l in range(1, k + 1):
            index_map[f"y{j},{l}"] = ((base + l) * n, (base + l + 1) * n)
            L[sl(base + l), sl(base + l - 1)] = -Ah / l if l > 1 else -Ah
        rhs[sl(base + 1)] = h * problem.b
        nxt = base + k + 1
        for l in range(k + 1):
            L[sl(nxt), sl(base + l)] = -np.eye(n)
    rhs[sl(0)] = problem.x0
    first_copy = m * (k + 1)
    for c in range(p):
        index_map[f"copy{c}"] = ((first_copy + c) * n, (first_copy + c + 1) * n)
        if c:
            L[sl(first_copy + c), sl(first_copy + c - 1)] = -np.eye(n)
    index_map["copies"] = (first_copy * n, nblocks * n)
    return ClockSystem(L, rhs, index_map)


def taylor_stepping(problem: ODEProblem) -> np.ndarray:
    """``x_m`` by direct truncated-Taylor stepping with the same recurrences."""
    x = problem.x0.copy()
    Ah = problem.A * problem.h
    for _ in range(problem.m):
        y = Ah @ x + problem.h * problem.b
        total = x + y
        for l in range(2, problem.k + 1):
            y = (Ah / l) @ y
            total = total + y
        x = total
    return x


def exact_final_state(problem: ODEProblem) -> np.ndarray:
    """``x(T)`` from the exponential of the augmented matrix ``[[A, b], [0, 0]]``."""
    from scipy.linalg import expm

    n = problem.n
    aug = np.zeros((n + 1, n + 1), dtype=complex)
    aug[:n, :n] = problem.A
    aug[:n, n] = problem.b
    return (expm(aug * problem.T) @ np.concatenate([problem.x0, [1.0]]))[:n]


def ode_solve(problem: ODEProblem, eps: float = 1e-4, kappa: float | None = None) -> SolveReport:
    """Solve the clock system with the Chebyshev QLSA and postselect the copy window.

    ``kappa`` defaults to the classically computed condition number of the clock matrix.
    """
    clock = ode_clock_build(problem)
    if kappa is None:
        kappa = float(np.linalg.cond(clock.matrix))
    lin = LinearSystemProblem(clock.matrix, clock.rhs, max(kappa, 1.0 + 1e-9), eps)
    report = qlsa_chebyshev(lin)
    lo, hi = clock.index_map["copies"]
    window = report.solution[lo:hi]
    prob = float(np.vdot(window, window).real)
    if prob < CLOCK_FLOOR:
        raise PostselectionError(f"clock postselection probability {prob:.3e} is below {CLOCK_FLOOR}")
    copies = window.reshape(problem.p, problem.n)
    x = copies.sum(axis=0)
    x = x / np.linalg.norm(x)
    lo_x, hi_x = clock.index_map["copy0"]
    return SolveReport(x, report.success_prob * prob, report.degree_or_bits_used, (lo_x, hi_x),
                       1.0 - prob, "ode", None,
                       {"kappa": kappa, "clock_prob": prob, "copies_window": [lo, hi], **report.meta})
