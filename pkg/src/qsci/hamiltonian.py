"""Approximations of ``exp(-i H t)``: product formulas, truncated Taylor series, QSP.

Everything uses the ``e^{-iHt}`` sign convention; callers wanting ``e^{+iAt}``
negate ``t``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .circuit import Circuit, unitary
from .encodings import (BlockEncoding, PauliString, PauliSum, apply_block_encoding, block_encode_matrix,
                        is_hermitian, pauli_decompose, pauli_reconstruct)
from .errors import InputError, PostselectionError, ToleranceError
from .polynomials import chebyshev_block_encoding, jacobi_anger
from .statevector import StateVector, kron, zero_state
from .subroutines import UnitaryTermSum, lcu_circuit, postselect

HERMITIAN_TOL = 1e-10
A2_STEPS = (10, 20, 40, 80, 100, 200, 400, 800, 1000, 2000, 4000, 8000, 10000)


@dataclass
class HamiltonianSpec:
    """A Hamiltonian (Pauli sum or dense matrix) plus simulation parameters."""

    pauli_sum: PauliSum | None = None
    matrix: np.ndarray | None = None
    t: float = 1.0
    r: int = 1
    K: int | None = None
    eps: float = 1e-8

    def __post_init__(self):
        if self.pauli_sum is None and self.matrix is None:
            raise InputError("need a Pauli sum or a dense matrix")
        if self.matrix is not None:
            self.matrix = np.asarray(self.matrix, dtype=complex)
            if not is_hermitian(self.matrix, HERMITIAN_TOL):
                raise InputError("Hamiltonian matrix is not Hermitian")
        if self.pauli_sum is not None and not is_hermitian(self.dense(), HERMITIAN_TOL):
            raise InputError("Pauli sum does not reconstruct to a Hermitian matrix")
        if self.r < 1:
            raise InputError("step count r must be at least 1")
        if self.K is not None and self.K < 1:
            raise InputError("truncation K must be at least 1")

    def dense(self) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix
        return pauli_reconstruct(self.pauli_sum)

    def paulis(self) -> PauliSum:
        if self.pauli_sum is None:
            self.pauli_sum = pauli_decompose(self.matrix)
        return self.pauli_sum

    @property
    def num_qubits(self) -> int:
        return self.dense().shape[0].bit_length() - 1


def exact_unitary(H, t: float) -> np.ndarray:
    """``e^{-iHt}`` from the eigendecomposition of Hermitian ``H``."""
    H = np.asarray(H, dtype=complex)
    if not is_hermitian(H, HERMITIAN_TOL):
        raise InputError("exact evolution needs a Hermitian matrix")
    w, V = np.linalg.eigh((H + H.conj().T) / 2)
    return (V * np.exp(-1j * w * t)) @ V.conj().T


def pauli_string_exp(s, theta: float, num_qubits: int | None = None) -> Circuit:
    """Circuit for ``exp(-i theta P)`` with ``P`` a non-identity Pauli string.

    Basis change onto Z (H for X, Rx(-pi/2) for Y), a CNOT ladder onto the last
    active qubit, ``Rz(2 theta)``, then everything undone.
    """
    s = s if isinstance(s, PauliString) else PauliString(s)
    if s.is_identity:
        raise InputError("identity string only contributes a global phase")
    n = num_qubits or s.num_qubits
    c = Circuit(n)
    active = [q for q, p in enumerate(s.labels) if p != "I"]
    for q in active:
        if s.labels[q] == "X":
            c.h(q)
        elif s.labels[q] == "Y":
            c.rx(np.pi / 2, q)
    for a, b in zip(active, active[1:]):
        c.cx(a, b)
    c.rz(2 * theta, active[-1])
    for a, b in reversed(list(zip(active, active[1:]))):
        c.cx(a, b)
    for q in active:
        if s.labels[q] == "X":
            c.h(q)
        elif s.labels[q] == "Y":
            c.rx(-np.pi / 2, q)
    return c


def _real_terms(spec: HamiltonianSpec):
    ps = spec.paulis()
    if not ps.is_real():
        raise InputError("product formulas need real Pauli coefficients")
    return [(c.real, p) for c, p in ps.terms if not p.is_identity]


def _term_exp(c: Circuit, p: PauliString, theta: float):
    """Append ``exp(-i theta P)``; weight-one strings use the native rotation."""
    active = [q for q, ch in enumerate(p.labels) if ch != "I"]
    if len(active) == 1:
        q = active[0]
        {"X": c.rx, "Y": c.ry, "Z": c.rz}[p.labels[q]](2 * theta, q)
    else:
        c.ops.extend(pauli_string_exp(p, theta, c.num_qubits).ops)


def _trotter_step(spec: HamiltonianSpec, order: int) -> Circuit:
    terms = _real_terms(spec)
    dt = spec.t / spec.r
    c = Circuit(spec.num_qubits)
    if order == 1:
        for coef, p in terms:
            _term_exp(c, p, coef * dt)
    elif order == 2:
        for coef, p in terms[:-1]:
            _term_exp(c, p, coef * dt / 2)
        if terms:
            _term_exp(c, terms[-1][1], terms[-1][0] * dt)
        for coef, p in reversed(terms[:-1]):
            _term_exp(c, p, coef * dt / 2)
    else:
        raise InputError("only first and second order product formulas are provided")
    return c


def trotter1(spec: HamiltonianSpec) -> Circuit:
    """``r`` repetitions of ``prod_j exp(-i c_j P_j t / r)``. Identity terms (global phase) are dropped."""
    step = _trotter_step(spec, 1)
    return Circuit(step.num_qubits, step.ops * spec.r)


def trotter2(spec: HamiltonianSpec) -> Circuit:
    """Symmetric splitting: half steps forward, full last term, half steps back."""
    step = _trotter_step(spec, 2)
    return Circuit(step.num_qubits, step.ops * spec.r)


def trotter_unitary(spec: HamiltonianSpec, order: int) -> np.ndarray:
    """Unitary of the order-``order`` circuit, as the ``r``-th power of one step."""
    return np.linalg.matrix_power(unitary(_trotter_step(spec, order)), spec.r)


def _identity_phase(spec: HamiltonianSpec) -> complex:
    ps = spec.paulis()
    shift = sum(c for c, p in ps.terms if p.is_identity)
    return np.exp(-1j * shift * spec.t)


def trotter_error(spec: HamiltonianSpec, order: int) -> float:
    """Spectral-norm distance between the product formula and ``e^{-iHt}``."""
    approx = _identity_phase(spec) * trotter_unitary(spec, order)
    return float(np.linalg.norm(approx - exact_unitary(spec.dense(), spec.t), 2))


def trotter_error_sweep(pauli_sum: PauliSum, times=(1, 2, 3, 4, 5), steps=A2_STEPS, orders=(1, 2)):
    """Rows ``(t, r, order, error)`` over a grid of times and step counts."""
    rows = []
    for order in orders:
        for t in times:
            for r in steps:
                spec = HamiltonianSpec(pauli_sum, t=float(t), r=int(r))
                rows.append((float(t), int(r), int(order), trotter_error(spec, order)))
    return rows


def default_taylor_order(tau_norm: float, eps: float) -> int:
    """Smallest ``K`` with ``x^(K+1) / (K+1)! <= eps`` where ``x = t ||alpha||_1 / r``."""
    K = 1
    while tau_norm ** (K + 1) / factorial(K + 1) > eps:
        K += 1
        if K > 200:
            raise ToleranceError("Taylor truncation did not reach eps")
    return K


def _taylor_segment(spec: HamiltonianSpec):
    ps = spec.paulis()
    H = pauli_reconstruct(ps)
    tau = spec.t / spec.r
    norm = ps.one_norm
    K = spec.K or default_taylor_order(abs(tau) * norm, spec.eps)
    seg = np.zeros_like(H)
    power = np.eye(H.shape[0], dtype=complex)
    s = 0.0
    for k in range(K + 1):
        seg += (-1j * tau) ** k / factorial(k) * power
        s += (abs(tau) * norm) ** k / factorial(k)
        power = power @ H
    return seg, s, K


def taylor_operator(spec: HamiltonianSpec) -> np.ndarray:
    """``U_r^r`` with ``U_r`` the truncated series of one segment (for error analysis)."""
    seg, _, _ = _taylor_segment(spec)
    return np.linalg.matrix_power(seg, spec.r)


def taylor_sim(spec: HamiltonianSpec, state: StateVector):
    """Truncated-Taylor LCU, one postselected segment at a time.

    Each segment block-encodes ``U_r / s`` with ``s = sum_k (t ||alpha||_1 / r)^k / k!``
    (the LCU 1-norm of the term products). Returns ``(state, total_success_probability)``.
    """
    if state.num_qubits != spec.num_qubits:
        raise InputError("state width does not match the Hamiltonian")
    seg, s, _ = _taylor_segment(spec)
    be = block_encode_matrix(seg, s)
    prob = 1.0
    for _ in range(spec.r):
        state, p = apply_block_encoding(be, state)
        prob *= p
    return state, prob


def positive_shift(be: BlockEncoding) -> BlockEncoding:
    """Block-encoding of ``(H / alpha + I) / 2`` as an equal-weight LCU of ``U`` and ``I``."""
    terms = UnitaryTermSum([(0.5, be.unitary), (0.5, np.eye(be.unitary.shape[0]))])
    circuit, m = lcu_circuit(terms)
    target = 0.5 * (be.matrix / be.alpha + np.eye(be.sys_dim))
    return BlockEncoding(unitary(circuit), m + be.num_ancillas, be.num_system, 1.0, target)


def qsp_sim(be: BlockEncoding, t: float, eps: float, state: StateVector, max_degree: int = 10001):
    """``e^{-iHt}|psi>`` up to global phase via Jacobi-Anger series of the shifted Hamiltonian.

    ``H_+ = (H/alpha + I)/2`` has spectrum in [0, 1] and ``e^{-2 i alpha t H_+}``
    differs from ``e^{-iHt}`` by the phase ``e^{-i alpha t}``. The cosine and sine
    series are block-encoded separately and joined by one LCU with weights
    ``1`` and ``-i``. Returns ``(state, success_probability)``.
    """
    if state.num_qubits != be.num_system:
        raise InputError("state width does not match the encoded matrix")
    if not is_hermitian(be.matrix, HERMITIAN_TOL):
        raise InputError("Hamiltonian simulation needs a Hermitian block-encoding")
    shifted = positive_shift(be)
    tau = 2 * be.alpha * t
    cos_s, sin_s = jacobi_anger(tau, eps)
    if max(cos_s.degree, sin_s.degree) > max_degree:
        raise ToleranceError(f"degree {sin_s.degree} needed for eps={eps} exceeds cap {max_degree}")
    # at t = 0 the sine series vanishes and only the cosine branch remains
    parts = [(w, chebyshev_block_encoding(shifted, s)) for w, s in ((1.0, cos_s), (-1j, sin_s)) if s.one_norm > 0]
    terms = UnitaryTermSum([(w * b.alpha, b.unitary) for w, b in parts])
    cos_be = parts[0][1]
    circuit, m = lcu_circuit(terms)
    inner = cos_be.num_ancillas
    from .circuit import run

    full = run(circuit, kron(zero_state(m + inner), state)).amplitudes
    n_total = m + inner + be.num_system
    post, prob = postselect(full, n_total, range(m + inner), (0,) * (m + inner))
    return StateVector.from_array(post), prob
