"""Finite-difference PDE building blocks: Kronecker-sum Laplacians and wave lifting."""
from __future__ import annotations

from functools import reduce

import numpy as np

from ..encodings import is_hermitian
from ..errors import InputError
from ..hamiltonian import exact_unitary
from .linear import LinearSystemProblem, SolveReport, qlsa_chebyshev, qlsa_pd

FACTOR_TOL = 1e-10


def laplacian_1d(n: int, bc: str = "dirichlet") -> np.ndarray:
    """Tridiagonal ``(-1, 2, -1)`` second-difference matrix (unscaled by ``1/h^2``)."""
    if n < 2:
        raise InputError("need at least two grid points")
    if bc.lower() != "dirichlet":
        raise InputError(f"unsupported boundary condition {bc!r}")
    return 2 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)


def kron_sum_laplacian(L, d: int) -> np.ndarray:
    """``sum_i I x ... x L x ... x I`` with ``L`` in slot ``i``."""
    L = np.asarray(L)
    if d < 1:
        raise InputError("dimension must be at least 1")
    eye = np.eye(L.shape[0])
    return sum(reduce(np.kron, [L if i == j else eye for j in range(d)]) for i in range(d))


def kron_sum_exp(L, d: int, t: float) -> np.ndarray:
    """``e^{i S t}`` for the Kronecker sum ``S`` of ``d`` copies of ``L``, as ``(e^{iLt})^{x d}``."""
    factor = exact_unitary(L, -t)
    return reduce(np.kron, [factor] * d)


def difference_matrix(n: int) -> np.ndarray:
    """``n x (n+1)`` edge-difference matrix with ``B B^T`` the Dirichlet Laplacian."""
    if n < 2:
        raise InputError("need at least two grid points")
    return np.eye(n, n + 1) - np.eye(n, n + 1, k=1)


def wave_lift(n: int, h: float = 1.0):
    """Hermitian first-order generator ``(1/h) [[0, B], [B^T, 0]]`` and ``B``.

    Its square is ``diag(B B^T, B^T B) / h^2``, so the first ``n`` entries of
    ``e^{-iHt} psi`` obey the discrete wave equation.
    """
    B = difference_matrix(n)
    resid = np.max(np.abs(B @ B.T - laplacian_1d(n)))
    if resid > FACTOR_TOL:
        raise InputError(f"factorization residual {resid:.3g} too large")
    H = np.block([[np.zeros((n, n)), B], [B.T, np.zeros((n + 1, n + 1))]]) / h
    return H, B


def second_order_lift(A, c: float = 0.0, b=None):
    """First-order form of ``u'' = (A + cI) u + b``: generator ``[[0, I], [A + cI, 0]]`` and ``(0, b)``."""
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    n = A.shape[0]
    G = np.block([[np.zeros((n, n)), np.eye(n)], [A + c * np.eye(n), np.zeros((n, n))]])
    b = np.zeros(n) if b is None else np.asarray(b, dtype=complex)
    return G, np.concatenate([np.zeros(n, dtype=complex), b])


def wave_evolve(n: int, phi_v, t: float, h: float = 1.0, phi_e=None) -> np.ndarray:
    """Evolve ``(phi_V, phi_E)`` for time ``t`` under the lifted generator (exact unitary)."""
    H, _ = wave_lift(n, h)
    phi_v = np.asarray(phi_v, dtype=complex)
    phi_e = np.zeros(n + 1, dtype=complex) if phi_e is None else np.asarray(phi_e, dtype=complex)
    return exact_unitary(H, t) @ np.concatenate([phi_v, phi_e])


def poisson_solve(n: int, f, d: int = 1, route: str = "pd", eps: float = 1e-4) -> SolveReport:
    """Solve ``L u = f`` for the ``d``-dimensional Dirichlet Laplacian with a QLSA route."""
    L = kron_sum_laplacian(laplacian_1d(n), d)
    w = np.linalg.eigvalsh(L)
    kappa = float(w.max() / w.min())
    problem = LinearSystemProblem(L, np.asarray(f, dtype=complex), kappa * (1 + 1e-9), eps)
    if route == "pd":
        return qlsa_pd(problem)
    if route == "cheb":
        return qlsa_chebyshev(problem)
    raise InputError(f"unknown Poisson route {route!r}")
