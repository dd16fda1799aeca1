"""Matrix access models: Pauli basis, Hermitian dilation, block-encodings, sparse oracles."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .circuit import unitary
from .errors import EncodingError, InputError, PostselectionError
from .gates import PAULI, is_unitary
from .statevector import StateVector, kron, next_pow2, num_qubits_for, zero_state
from .subroutines import UnitaryTermSum, lcu_circuit, postselect

DROP_TOL = 1e-12
BLOCK_TOL = 1e-10


def pad_matrix(M) -> np.ndarray:
    """Zero-pad to a square matrix whose side is the next power of two."""
    M = np.atleast_2d(np.asarray(M))
    if M.size == 0:
        raise InputError("cannot pad an empty matrix")
    side = max(2, next_pow2(max(M.shape)))
    out = np.zeros((side, side), dtype=np.result_type(M.dtype, float))
    out[: M.shape[0], : M.shape[1]] = M
    return out


@dataclass(frozen=True)
class PauliString:
    labels: str

    def __post_init__(self):
        labels = self.labels.upper()
        if not labels or set(labels) - set("IXYZ"):
            raise InputError(f"invalid Pauli string {self.labels!r}")
        object.__setattr__(self, "labels", labels)

    @property
    def num_qubits(self) -> int:
        return len(self.labels)

    @property
    def is_identity(self) -> bool:
        return set(self.labels) == {"I"}

    def matrix(self) -> np.ndarray:
        out = np.ones((1, 1), dtype=complex)
        for c in self.labels:
            out = np.kron(out, PAULI[c])
        return out

    def __str__(self):
        return self.labels


@dataclass
class PauliSum:
    """Weighted Pauli strings ``sum_k c_k P_k`` of a common length."""

    terms: list

    def __post_init__(self):
        terms = [(complex(c), p if isinstance(p, PauliString) else PauliString(p)) for c, p in self.terms]
        if terms and len({p.num_qubits for _, p in terms}) != 1:
            raise InputError("Pauli strings must share one length")
        self.terms = terms

    @property
    def num_qubits(self) -> int:
        return self.terms[0][1].num_qubits

    def coefficients(self) -> dict:
        return {p.labels: c for c, p in self.terms}

    @property
    def one_norm(self) -> float:
        return float(sum(abs(c) for c, _ in self.terms))

    def is_real(self, tol: float = 1e-12) -> bool:
        return all(abs(c.imag) <= tol for c, _ in self.terms)

    def __len__(self):
        return len(self.terms)

    def to_list(self) -> list:
        return [[[c.real, c.imag], p.labels] for c, p in self.terms]

    @classmethod
    def from_list(cls, items) -> "PauliSum":
        out = []
        for coef, label in items:
            c = complex(coef[0], coef[1]) if isinstance(coef, (list, tuple)) else complex(coef)
            out.append((c, label))
        return cls(out)


def _pauli_entries(labels: str, rows: np.ndarray):
    """Column index and value of the single nonzero in each row of a Pauli string matrix."""
    n = len(labels)
    cols = rows.copy()
    vals = np.ones(rows.size, dtype=complex)
    for q, c in enumerate(labels):
        bit = (rows >> (n - 1 - q)) & 1
        if c in "XY":
            cols ^= 1 << (n - 1 - q)
        if c == "Z":
            vals *= 1 - 2 * bit
        elif c == "Y":
            vals *= np.where(bit == 0, -1j, 1j)
    return cols, vals


def pauli_decompose(M, tol: float = DROP_TOL) -> PauliSum:
    """Coefficients ``Tr(P M) / 2**n`` over all ``4**n`` strings; tiny ones dropped.

    Each string matrix is a signed permutation, so every trace costs ``O(2**n)``.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InputError("Pauli decomposition needs a square matrix")
    n = num_qubits_for(M.shape[0])
    if n == 0:
        raise InputError("matrix must be at least 2x2")
    rows = np.arange(2**n)
    terms = []
    for labels in product("IXYZ", repeat=n):
        labels = "".join(labels)
        cols, vals = _pauli_entries(labels, rows)
        # Tr(P M) = sum_i P[i, c(i)] M[c(i), i]
        coef = np.sum(vals * M[cols, rows]) / 2**n
        if abs(coef) > tol:
            terms.append((coef, labels))
    return PauliSum(terms)


def pauli_reconstruct(ps: PauliSum) -> np.ndarray:
    if not ps.terms:
        raise InputError("empty Pauli sum has no dimension")
    return sum(c * p.matrix() for c, p in ps.terms)


def hermitian_dilate(A):
    """``[[0, A], [A^dagger, 0]]`` and where the blocks live.

    For a linear system ``A x = b`` the dilated right-hand side is ``(b, 0)`` and
    the solution occupies the second block.
    """
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InputError("dilation needs a square matrix")
    n = A.shape[0]
    Z0 = np.zeros_like(A)
    H = np.block([[Z0, A], [A.conj().T, Z0]])
    return H, {"rhs_block": (0, n), "solution_block": (n, 2 * n)}


def is_hermitian(A, tol: float = 1e-10) -> bool:
    A = np.asarray(A)
    return A.ndim == 2 and A.shape[0] == A.shape[1] and bool(np.max(np.abs(A - A.conj().T), initial=0) <= tol)


@dataclass(frozen=True, eq=False)
class BlockEncoding:
    """Unitary on ``m`` ancillas (leading qubits) plus ``n`` system qubits.

    ``(<0^m| x I) U (|0^m> x I) = matrix / alpha``. Construction validates
    unitarity, the block identity and the norm bound, and fails loudly.
    """

    unitary: np.ndarray
    num_ancillas: int
    num_system: int
    alpha: float
    matrix: np.ndarray

    def __post_init__(self):
        U = np.asarray(self.unitary, dtype=complex)
        A = np.asarray(self.matrix, dtype=complex)
        dim = 2 ** (self.num_ancillas + self.num_system)
        if U.shape != (dim, dim) or A.shape != (2**self.num_system,) * 2:
            raise EncodingError("block-encoding dimensions are inconsistent")
        if self.alpha <= 0:
            raise EncodingError("subnormalization must be positive")
        if not is_unitary(U, BLOCK_TOL * max(1, dim) ** 0.5):
            raise EncodingError("block-encoding is not unitary")
        if np.linalg.norm(A / self.alpha, 2) > 1 + BLOCK_TOL:
            raise EncodingError("||A / alpha||_2 exceeds 1")
        if np.max(np.abs(self.block() - A / self.alpha), initial=0) > BLOCK_TOL:
            raise EncodingError("top-left block does not equal A / alpha")
        U.setflags(write=False)
        A.setflags(write=False)
        object.__setattr__(self, "unitary", U)
        object.__setattr__(self, "matrix", A)
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def sys_dim(self) -> int:
        return 2**self.num_system

    def block(self) -> np.ndarray:
        d = self.sys_dim
        return self.unitary[:d, :d]


def _resolve_alpha(A, alpha):
    if alpha is None:
        alpha = float(np.linalg.norm(A, 2))
        if alpha == 0:
            alpha = 1.0
    if np.linalg.norm(A, 2) / alpha > 1 + BLOCK_TOL:
        raise EncodingError(f"||A||_2 = {np.linalg.norm(A, 2):.6g} exceeds alpha = {alpha:.6g}")
    return float(alpha)


def block_encode_hermitian(A, alpha: float | None = None) -> BlockEncoding:
    """One-ancilla rotation form ``[[A/a, -S], [S, A/a]]`` with ``S = sqrt(I - (A/a)^2)``."""
    A = np.asarray(A, dtype=complex)
    if not is_hermitian(A):
        raise EncodingError("matrix is not Hermitian; dilate it or use block_encode_matrix")
    n = num_qubits_for(A.shape[0])
    alpha = _resolve_alpha(A, alpha)
    B = A / alpha
    w, V = np.linalg.eigh((B + B.conj().T) / 2)
    S = (V * np.sqrt(np.clip(1 - w**2, 0, None))) @ V.conj().T
    U = np.block([[B, -S], [S, B]])
    return BlockEncoding(U, 1, n, alpha, A)


def block_encode_matrix(A, alpha: float | None = None) -> BlockEncoding:
    """One-ancilla unitary dilation ``[[M, sqrt(I - M M^+)], [sqrt(I - M^+ M), -M^+]]`` of any square ``M = A/a``."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise EncodingError("block-encoding needs a square matrix")
    n = num_qubits_for(A.shape[0])
    alpha = _resolve_alpha(A, alpha)
    M = A / alpha
    # both roots from one SVD so that M sqrt(I - M^+ M) = sqrt(I - M M^+) M holds to rounding
    W, sv, Vh = np.linalg.svd(M)
    c = np.sqrt(np.clip(1 - sv**2, 0, None))
    U = np.block([[M, (W * c) @ W.conj().T], [(Vh.conj().T * c) @ Vh, -M.conj().T]])
    return BlockEncoding(U, 1, n, alpha, A)


def block_encode_from_pauli_sum(ps: PauliSum) -> BlockEncoding:
    """LCU block-encoding with ``alpha = sum |c_k|`` on ``ceil(log2 L)`` ancillas."""
    if not ps.terms:
        raise InputError("empty Pauli sum")
    terms = UnitaryTermSum([(c, p.matrix()) for c, p in ps.terms])
    circuit, m = lcu_circuit(terms)
    return BlockEncoding(unitary(circuit), m, ps.num_qubits, terms.one_norm, terms.matrix())


def apply_block_encoding(be: BlockEncoding, state: StateVector):
    """Run ``U |0^m>|b>`` and postselect the ancillas on zero.

    Returns ``(A b / ||A b||, ||A b||**2 / alpha**2)``.
    """
    if state.num_qubits != be.num_system:
        raise InputError("state width does not match the encoded matrix")
    if be.num_ancillas == 0:
        return StateVector.from_array(be.unitary @ state.amplitudes), 1.0
    full = be.unitary @ kron(zero_state(be.num_ancillas), state).amplitudes
    post, prob = postselect(full, be.num_ancillas + be.num_system, range(be.num_ancillas), (0,) * be.num_ancillas)
    return StateVector.from_array(post), prob


SENTINEL = -1


class SparseOracle:
    """Position and value queries over a stored sparse matrix.

    ``position(i, v)`` returns the column of the ``v``-th (1-based) nonzero in row
    ``i``, or ``SENTINEL`` once ``v`` passes the row's count.
    """

    def __init__(self, M):
        M = np.asarray(M, dtype=complex)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise InputError("sparse oracle needs a square matrix")
        self.dimension = M.shape[0]
        self._rows = [tuple(int(j) for j in np.flatnonzero(M[i])) for i in range(self.dimension)]
        self._values = {(i, j): complex(M[i, j]) for i, cols in enumerate(self._rows) for j in cols}
        self.sparsity = max((len(r) for r in self._rows), default=0)

    def _check(self, *idx):
        if any(not 0 <= k < self.dimension for k in idx):
            raise InputError(f"index out of range for dimension {self.dimension}: {idx}")

    def position(self, i: int, v: int) -> int:
        self._check(i)
        if not 1 <= v <= max(self.sparsity, 1):
            raise InputError(f"enumeration index {v} outside 1..{self.sparsity}")
        row = self._rows[i]
        return row[v - 1] if v <= len(row) else SENTINEL

    def value(self, i: int, j: int) -> complex:
        self._check(i, j)
        return self._values.get((i, j), 0j)


def sparse_oracle_from_matrix(M) -> SparseOracle:
    return SparseOracle(M)
