"""Algorithmic primitives: QFT, phase estimation, amplitude amplification, LCU."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Histogram, inverse, run, sample_probabilities
from .errors import InputError, PostselectionError
from .statevector import StateVector, kron, zero_state

POSTSELECT_FLOOR = 1e-14


def qft(n: int, do_swaps: bool = False) -> Circuit:
    """Gate-level QFT (Hadamards and controlled phases) on ``n`` qubits.

    Without the final swaps the output register is bit-reversed; use
    ``bit_reversal(n)`` to reindex, or pass ``do_swaps=True`` for the exact DFT
    ``e^{+2 pi i j k / N} / sqrt(N)``.
    """
    if n < 1:
        raise InputError("qft needs at least one qubit")
    c = Circuit(n)
    for j in range(n):
        c.h(j)
        for k in range(j + 1, n):
            c.cp(2 * np.pi / 2 ** (k - j + 1), k, j)
    if do_swaps:
        for j in range(n // 2):
            c.swap(j, n - 1 - j)
    return c


def iqft(n: int, do_swaps: bool = False) -> Circuit:
    return inverse(qft(n, do_swaps))


def bit_reversal(n: int) -> np.ndarray:
    """Permutation taking each index to the index with its ``n`` bits reversed."""
    idx = np.arange(2**n)
    out = np.zeros_like(idx)
    for b in range(n):
        out |= ((idx >> b) & 1) << (n - 1 - b)
    return out


def postselect(amplitudes: np.ndarray, num_qubits: int, qubits, bits):
    """Project ``qubits`` onto ``bits`` and return (renormalized remainder, probability).

    The returned amplitude vector lives on the qubits that were not selected,
    in their original order.
    """
    t = np.asarray(amplitudes).reshape((2,) * num_qubits)
    index = [slice(None)] * num_qubits
    for q, b in zip(qubits, bits):
        index[q] = int(b)
    kept = t[tuple(index)].reshape(-1)
    prob = min(1.0, float(np.vdot(kept, kept).real))  # rounding can overshoot 1 by an ulp
    if prob < POSTSELECT_FLOOR:
        raise PostselectionError(f"postselection probability {prob:.3e} is below {POSTSELECT_FLOOR}")
    return kept / np.sqrt(prob), prob


@dataclass
class PhaseEstimate:
    phase: float
    num_bits: int
    distribution: Histogram
    probabilities: np.ndarray


def qpe_circuit(U, m_bits: int) -> Circuit:
    """Ancillas 0..m-1 (Hadamard-prepared) control ``U^(2^(m-1-j))``; inverse QFT readout."""
    U = np.asarray(U, dtype=complex)
    n_sys = U.shape[0].bit_length() - 1
    if U.shape != (2**n_sys, 2**n_sys):
        raise InputError("unitary dimension must be a power of two")
    if m_bits < 1:
        raise InputError("phase estimation needs at least one ancilla")
    c = Circuit(m_bits + n_sys)
    system = tuple(range(m_bits, m_bits + n_sys))
    c.h(list(range(m_bits)))
    power = U.copy()
    for j in reversed(range(m_bits)):
        c.unitary_gate(power, system, controls=(j,), label=f"CU^{2 ** (m_bits - 1 - j)}")
        power = power @ power
    return c.compose(iqft(m_bits, do_swaps=True), list(range(m_bits)))


def phase_estimate(U, eigenstate: StateVector, m_bits: int, shots: int = 1024, seed: int = 0) -> PhaseEstimate:
    """Estimate the phase ``phi`` of ``U|u> = e^{2 pi i phi}|u>`` as an ``m_bits`` binary fraction.

    Non-eigenstates give a mixture over their eigenphases; the reported phase is the
    most frequent sampled outcome.
    """
    circuit = qpe_circuit(U, m_bits)
    n_sys = circuit.num_qubits - m_bits
    if eigenstate.num_qubits != n_sys:
        raise InputError("eigenstate width does not match the unitary")
    state = run(circuit, kron(zero_state(m_bits), eigenstate))
    probs = state.probabilities().reshape(2**m_bits, -1).sum(axis=1)
    idx = sample_probabilities(probs, shots, seed)
    values, counts = np.unique(idx, return_counts=True)
    hist = Histogram(shots, {format(int(v), f"0{m_bits}b"): int(c) for v, c in zip(values, counts)})
    best = int(hist.most_frequent(), 2)
    return PhaseEstimate(best / 2**m_bits, m_bits, hist, probs)


def _good_mask(good, dim: int) -> np.ndarray:
    if callable(good):
        return np.array([bool(good(i)) for i in range(dim)])
    mask = np.zeros(dim, dtype=bool)
    mask[list(good)] = True
    return mask


def reflection_good(good, n: int) -> np.ndarray:
    """Householder reflection ``I - 2 sum_good |g><g|`` as a diagonal matrix."""
    return np.diag(np.where(_good_mask(good, 2**n), -1.0, 1.0)).astype(complex)


def reflection_zero(n: int, sign: float = 1.0) -> np.ndarray:
    """``sign * (I - 2|0><0|)``."""
    d = np.ones(2**n, dtype=complex)
    d[0] = -1.0
    return np.diag(sign * d)


def amplitude_amplify(prep: Circuit, good, k: int) -> Circuit:
    """``prep`` followed by ``k`` rounds of ``Q = -A S_0 A^dagger S_good``."""
    if k < 0:
        raise InputError("iteration count must be nonnegative")
    n = prep.num_qubits
    qubits = tuple(range(n))
    s_good = reflection_good(good, n)
    minus_s0 = reflection_zero(n, sign=-1.0)
    prep_dag = inverse(prep)
    out = Circuit(n, list(prep.ops))
    for _ in range(k):
        out.unitary_gate(s_good, qubits, label="S_GOOD")
        out = out.compose(prep_dag)
        out.unitary_gate(minus_s0, qubits, label="-S_0")
        out = out.compose(prep)
    return out


def success_probability(state: StateVector, good) -> float:
    return float(np.sum(state.probabilities()[_good_mask(good, state.dim)]))


def optimal_grover_iterations(num_items: int, num_marked: int = 1) -> int:
    return int(np.floor(np.pi / 4 * np.sqrt(num_items / num_marked)))


def grover_circuit(n: int, marked, k: int | None = None) -> Circuit:
    marked = [marked] if np.isscalar(marked) else list(marked)
    if k is None:
        k = optimal_grover_iterations(2**n, len(marked))
    prep = Circuit(n).h(list(range(n)))
    return amplitude_amplify(prep, marked, k)


def grover(n: int, marked, k: int | None = None, shots: int = 1024, seed: int = 0) -> Histogram:
    """Sampled readout of Grover search for ``marked`` among ``2**n`` items."""
    c = grover_circuit(n, marked, k).measure()
    from .circuit import sample

    return sample(c, shots, seed)


@dataclass
class UnitaryTermSum:
    """``sum_l coef_l U_l`` over same-sized unitaries; coefficients may be complex."""

    terms: list

    def __post_init__(self):
        if not self.terms:
            raise InputError("linear combination needs at least one term")
        mats = [np.asarray(u, dtype=complex) for _, u in self.terms]
        dim = mats[0].shape[0]
        if any(m.shape != (dim, dim) for m in mats):
            raise InputError("all unitaries must share one dimension")
        self.terms = [(complex(c), m) for (c, _), m in zip(self.terms, mats)]

    @property
    def dim(self) -> int:
        return self.terms[0][1].shape[0]

    @property
    def one_norm(self) -> float:
        return float(sum(abs(c) for c, _ in self.terms))

    def matrix(self) -> np.ndarray:
        return sum(c * u for c, u in self.terms)


def state_prep_unitary(amplitudes) -> np.ndarray:
    """Real orthogonal matrix whose first column is the (unit, real) vector ``amplitudes``."""
    a = np.asarray(amplitudes, dtype=float)
    e0 = np.zeros_like(a)
    e0[0] = 1.0
    v = e0 - a
    if np.linalg.norm(v) < 1e-15:
        return np.eye(a.size, dtype=complex)
    return (np.eye(a.size) - 2 * np.outer(v, v) / np.dot(v, v)).astype(complex)


def lcu_circuit(terms: UnitaryTermSum) -> tuple[Circuit, int]:
    """PREP^dagger SELECT PREP on ``m = ceil(log2 L)`` ancillas (qubits first).

    Coefficient phases are folded into the unitaries; unused branches carry zero
    weight. Returns the circuit and ``m``.
    """
    L = len(terms.terms)
    m = int(np.ceil(np.log2(L))) if L > 1 else 0
    n_sys = terms.dim.bit_length() - 1
    norm = terms.one_norm
    if norm == 0:
        raise InputError("all coefficients are zero")
    weights = np.zeros(2**m)
    weights[:L] = [abs(c) for c, _ in terms.terms]
    prep = state_prep_unitary(np.sqrt(weights / norm))
    c = Circuit(m + n_sys)
    anc = tuple(range(m))
    system = tuple(range(m, m + n_sys))
    if m:
        c.unitary_gate(prep, anc, label="PREP")
    for l, (coef, u) in enumerate(terms.terms):
        phased = (coef / abs(coef) if coef != 0 else 1.0) * u
        if m:
            c.unitary_gate(phased, system, controls=anc, control_states=tuple(int(b) for b in format(l, f"0{m}b")),
                           label=f"SELECT_{l}")
        else:
            c.unitary_gate(phased, system, label="SELECT_0")
    if m:
        c.unitary_gate(prep.conj().T, anc, label="PREP_DAG")
    return c, m


def lcu_apply(terms: UnitaryTermSum, state: StateVector):
    """Apply ``sum coef_l U_l / ||coef||_1`` by postselecting the ancillas on zero.

    Returns ``(post_state, success_probability)``.
    """
    if state.dim != terms.dim:
        raise InputError("state width does not match the unitaries")
    circuit, m = lcu_circuit(terms)
    if m == 0:
        return run(circuit, state), 1.0
    out = run(circuit, kron(zero_state(m), state))
    post, prob = postselect(out.amplitudes, circuit.num_qubits, range(m), (0,) * m)
    return StateVector.from_array(post), prob
