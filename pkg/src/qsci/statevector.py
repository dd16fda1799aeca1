"""Dense register states.

Basis labels are big-endian throughout: qubit 0 is the leftmost symbol of a ket
and the most significant bit of the basis index.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EncodingError, InputError

NORM_TOL = 1e-10


def _as_complex_vector(values) -> np.ndarray:
    arr = np.asarray(values, dtype=complex).reshape(-1)
    if arr.size == 0:
        raise InputError("empty vector")
    if not np.all(np.isfinite(arr)):
        raise InputError("vector entries must be finite")
    return arr


def num_qubits_for(dim: int) -> int:
    """Number of qubits whose register dimension is exactly ``dim``."""
    if dim < 1 or dim & (dim - 1):
        raise InputError(f"dimension {dim} is not a power of two")
    return dim.bit_length() - 1


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized amplitude array of an ``n``-qubit register.

    The array is stored read-only; every operation returns a new value.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _as_complex_vector(self.amplitudes).copy()
        num_qubits_for(amps.size)
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise InputError(f"state is not normalized (norm={norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_array(cls, values, renormalize: bool = True) -> "StateVector":
        """Wrap raw amplitudes, dividing by the 2-norm to absorb float drift."""
        amps = _as_complex_vector(values)
        if renormalize:
            norm = np.linalg.norm(amps)
            if norm == 0:
                raise EncodingError("cannot normalize the zero vector")
            amps = amps / norm
        return cls(amps)

    @property
    def num_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __array__(self, dtype=None, copy=None):
        return np.array(self.amplitudes, dtype=dtype)

    def __len__(self):
        return self.amplitudes.size

    def __repr__(self):
        return f"StateVector(num_qubits={self.num_qubits}, amplitudes={self.amplitudes!r})"


def zero_state(n: int) -> StateVector:
    """The all-zeros basis state on ``n`` qubits."""
    if n < 1:
        raise InputError("a register needs at least one qubit")
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = 1.0
    return StateVector(amps)


def basis_state(index: int, n: int) -> StateVector:
    if not 0 <= index < 2**n:
        raise InputError(f"basis index {index} out of range for {n} qubits")
    amps = np.zeros(2**n, dtype=complex)
    amps[index] = 1.0
    return StateVector(amps)


def next_pow2(k: int) -> int:
    return 1 << max(0, (k - 1).bit_length())


def amplitude_encode(v) -> StateVector:
    """Store a classical vector in amplitudes: pad at the tail, divide by the 2-norm."""
    arr = _as_complex_vector(v)
    norm = np.linalg.norm(arr)
    if norm == 0:
        raise EncodingError("amplitude encoding of an all-zero vector is undefined")
    dim = max(2, next_pow2(arr.size))
    padded = np.zeros(dim, dtype=complex)
    padded[: arr.size] = arr / norm
    return StateVector(padded)


def basis_embed(bits: str) -> StateVector:
    if not bits or set(bits) - {"0", "1"}:
        raise InputError(f"basis embedding needs a nonempty 0/1 string, got {bits!r}")
    return basis_state(int(bits, 2), len(bits))


def kron(s1: StateVector, s2: StateVector) -> StateVector:
    """Joint state of two registers; amplitude at ``i * 2**n2 + j`` is ``a_i * b_j``."""
    return StateVector.from_array(np.kron(s1.amplitudes, s2.amplitudes))


def _check_same_width(s1: StateVector, s2: StateVector):
    if s1.dim != s2.dim:
        raise InputError(f"dimension mismatch: {s1.num_qubits} vs {s2.num_qubits} qubits")


def inner(s1: StateVector, s2: StateVector) -> complex:
    _check_same_width(s1, s2)
    return complex(np.vdot(s1.amplitudes, s2.amplitudes))


def fidelity(s1: StateVector, s2: StateVector) -> float:
    """Overlap ``|<s1|s2>|**2``; blind to global phase."""
    return float(min(1.0, abs(inner(s1, s2)) ** 2))


def is_product_state(state: StateVector, n_left: int, tol: float = 1e-10) -> bool:
    """True when ``state`` factors as (n_left qubits) x (remaining qubits).

    The amplitudes reshaped to a ``2**n_left`` by ``2**n_right`` matrix have rank one
    exactly for product states.
    """
    if not 0 < n_left < state.num_qubits:
        raise InputError("split point must leave qubits on both sides")
    mat = state.amplitudes.reshape(2**n_left, -1)
    sv = np.linalg.svd(mat, compute_uv=False)
    return bool(np.all(sv[1:] <= tol))


def align_phase(target: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Multiply ``target`` by the unit phase that best matches ``reference``."""
    overlap = np.vdot(target, reference)
    if abs(overlap) == 0:
        return np.asarray(target)
    return np.asarray(target) * (overlap / abs(overlap))
