"""Quantum linear-system routes on top of block-encodings and phase estimation."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..circuit import Circuit, inverse, run
from ..encodings import block_encode_hermitian, hermitian_dilate, is_hermitian, pad_matrix
from ..errors import InputError, PostselectionError
from ..gates import ry
from ..hamiltonian import exact_unitary
from ..polynomials import PhaseSequence, chebyshev_apply, inverse_coeffs, pd_inverse_coeffs, qsp_apply
from ..statevector import StateVector, amplitude_encode, kron, zero_state
from ..subroutines import POSTSELECT_FLOOR, postselect, qpe_circuit

WINDOW_TOL = 1e-10
LEAK_FLOOR = 1e-3  # clock values below this probability are treated as QPE leakage


@dataclass
class LinearSystemProblem:
    """``A x = b`` with a condition-number bound and target precision."""

    A: np.ndarray
    b: np.ndarray
    kappa_bound: float = 10.0
    eps: float = 1e-3
    alpha_bound: float | None = None

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=complex))
        self.b = np.atleast_1d(np.asarray(self.b, dtype=complex))
        if self.A.ndim != 2 or self.A.shape[0] != self.A.shape[1]:
            raise InputError("A must be square")
        if self.b.shape != (self.A.shape[0],):
            raise InputError(f"b has length {self.b.size}, A is {self.A.shape[0]}x{self.A.shape[0]}")
        if not np.any(self.b):
            raise InputError("b must be nonzero")
        if self.kappa_bound < 1:
            raise InputError("kappa bound must be at least 1")
        if not 0 < self.eps < 1:
            raise InputError("eps must lie in (0, 1)")

    @property
    def n(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True)
class SolveReport:
    """Normalized solution plus the bookkeeping needed to trust it.

    ``solution`` is the logical vector (length of the original ``b``);
    ``solution_state`` is the same vector amplitude-encoded.
    """

    solution: np.ndarray
    success_prob: float
    degree_or_bits_used: int
    window: tuple
    complement_norm: float = 0.0
    route: str = ""
    residual: float | None = None
    meta: dict = field(default_factory=dict)

    @property
    def solution_state(self) -> StateVector:
        return amplitude_encode(self.solution)

    def to_dict(self) -> dict:
        return {
            "route": self.route,
            "solution": [[float(z.real), float(z.imag)] for z in self.solution],
            "success_prob": self.success_prob,
            "degree_or_bits_used": self.degree_or_bits_used,
            "window": list(self.window),
            "complement_norm": self.complement_norm,
            "residual": self.residual,
            "bit_order": "big-endian",
            **self.meta,
        }


def classical_residual(A, b, x) -> float:
    """``min_c ||A (c x) - b|| / ||b||``: residual after the best rescaling of ``x``."""
    Ax = np.asarray(A) @ x
    c = np.vdot(Ax, b) / np.vdot(Ax, Ax)
    return float(np.linalg.norm(c * Ax - b) / np.linalg.norm(b))


def _prepare(problem: LinearSystemProblem):
    """Dilate if needed, pad, and return (matrix, rhs, window, dilated flag)."""
    A, b = problem.A, problem.b
    n = problem.n
    dilated = not is_hermitian(A)
    if dilated:
        A, blocks = hermitian_dilate(A)
        b = np.concatenate([b, np.zeros(n, dtype=complex)])
        window = blocks["solution_block"]
    else:
        window = (0, n)
    M = pad_matrix(A)
    rhs = np.zeros(M.shape[0], dtype=complex)
    rhs[: b.size] = b
    return M, rhs, window, dilated


def _alpha(problem: LinearSystemProblem, M) -> float:
    return float(problem.alpha_bound) if problem.alpha_bound else float(np.linalg.norm(M, 2))


def _check_kappa(M, alpha, kappa, support):
    """Classical check that the nonzero spectrum on the used subspace lies in [alpha/kappa, alpha]."""
    w = np.abs(np.linalg.eigvalsh(M[np.ix_(support, support)]))
    if w.min() < alpha / kappa * (1 - 1e-9):
        raise InputError(f"smallest |eigenvalue| {w.min():.4g} violates the kappa bound (alpha/kappa = {alpha / kappa:.4g})")


def _extract(vec: np.ndarray, window, prob: float, route: str, used: int, problem, meta=None) -> SolveReport:
    lo, hi = window
    part = vec[lo:hi]
    inside = float(np.vdot(part, part).real)
    total = float(np.vdot(vec, vec).real)
    if inside < POSTSELECT_FLOOR * total:
        raise PostselectionError("solution window is empty")
    complement = max(0.0, 1.0 - inside / total)
    x = part / np.sqrt(inside)
    return SolveReport(x, prob * inside / total, used, (lo, hi), complement, route,
                       classical_residual(problem.A, problem.b, x), dict(meta or {}))


def qlsa_chebyshev(problem: LinearSystemProblem, check_kappa: bool = False) -> SolveReport:
    """Chebyshev-series QLSA: block-encode ``A/alpha`` and apply the odd ``1/x`` series."""
    M, rhs, window, dilated = _prepare(problem)
    alpha = _alpha(problem, M)
    if check_kappa:
        _check_kappa(M, alpha, problem.kappa_bound, np.arange(window[1] if dilated else problem.n))
    be = block_encode_hermitian(M, alpha)
    series = inverse_coeffs(problem.kappa_bound, problem.eps)
    state, prob = chebyshev_apply(be, series, amplitude_encode(rhs))
    return _extract(state.amplitudes, window, prob, "qlsa-cheb", series.degree, problem,
                    {"gamma": series.meta["gamma"], "alpha": alpha, "dilated": dilated})


def qlsa_qsp(problem: LinearSystemProblem, phases: PhaseSequence, check_kappa: bool = False) -> SolveReport:
    """QLSA with externally supplied QSP phases and real-part extraction.

    The phase metadata must describe an inverse-function target fitted for a
    ``kappa`` at least as large as the problem's bound.
    """
    if "inv" not in (phases.target or "").lower():
        raise InputError(f"phase target {phases.target!r} is not an inverse-function polynomial")
    if phases.kappa is None or phases.kappa < problem.kappa_bound:
        raise InputError(f"phases were fitted for kappa={phases.kappa}, problem needs {problem.kappa_bound}")
    if phases.degree % 2 == 0:
        raise InputError("inverse polynomials are odd; the phase sequence has even degree")
    M, rhs, window, dilated = _prepare(problem)
    alpha = _alpha(problem, M)
    if check_kappa:
        _check_kappa(M, alpha, phases.kappa, np.arange(window[1] if dilated else problem.n))
    be = block_encode_hermitian(M, alpha)
    state, prob = qsp_apply(be, phases, amplitude_encode(rhs), extract_real=True)
    return _extract(state.amplitudes, window, prob, "qlsa-qsp", phases.degree, problem,
                    {"alpha": alpha, "dilated": dilated})


def _is_spd(A) -> bool:
    if not is_hermitian(A):
        return False
    try:
        np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        return False
    return True


def qlsa_pd(problem: LinearSystemProblem) -> SolveReport:
    """Positive-definite route: ``A^{-1} = eta (I - B)^{-1}`` with ``B = I - eta A``.

    The series for ``1/(1-y)`` on ``[-1, 1 - 1/kappa]`` has degree growing like
    ``sqrt(kappa)``.
    """
    if not _is_spd(problem.A):
        raise InputError("positive-definite route needs a symmetric positive-definite matrix")
    lam_max = float(problem.alpha_bound) if problem.alpha_bound else float(np.linalg.eigvalsh(problem.A).max())
    eta = 1.0 / lam_max
    B = pad_matrix(np.eye(problem.n) - eta * problem.A)
    if B.shape[0] > problem.n:
        # pad block of B is unused by b; keep it inside the unit ball
        B[problem.n:, problem.n:] = 0
    rhs = np.zeros(B.shape[0], dtype=complex)
    rhs[: problem.n] = problem.b
    be = block_encode_hermitian(B, 1.0)
    series = pd_inverse_coeffs(problem.kappa_bound, problem.eps)
    state, prob = chebyshev_apply(be, series, amplitude_encode(rhs))
    return _extract(state.amplitudes, (0, problem.n), prob, "qlsa-pd", series.degree, problem,
                    {"gamma": series.meta["gamma"], "eta": eta})


def hhl_default_t0(lam_max_bound: float, m_bits: int) -> float:
    """Largest evolution time keeping ``lam_max_bound`` on the top clock value ``2^m - 1``."""
    return 2 * np.pi * (1 - 2.0**-m_bits) / lam_max_bound


def hhl_circuit(A, m_bits: int, C: float, t0: float, clock_probs=None) -> Circuit:
    """Ancilla (qubit 0), clock (qubits 1..m), system; QPE, eigenvalue rotation, inverse QPE."""
    n_sys = A.shape[0].bit_length() - 1
    U = exact_unitary(A, -t0)  # e^{+iAt0}
    qpe = qpe_circuit(U, m_bits)
    c = Circuit(1 + m_bits + n_sys)
    reg = list(range(1, 1 + m_bits + n_sys))
    c = c.compose(qpe, reg)
    clock = tuple(range(1, 1 + m_bits))
    for k in range(1, 2**m_bits):
        lam = 2 * np.pi * k / (2**m_bits * t0)
        ratio = C / lam
        if ratio > 1:
            if clock_probs is None or clock_probs[k] >= LEAK_FLOOR:
                raise InputError(f"C={C:.4g} exceeds the eigenvalue estimate {lam:.4g}")
            ratio = 1.0  # leakage bin: saturate the rotation
        bits = tuple(int(x) for x in format(k, f"0{m_bits}b"))
        c.unitary_gate(ry(2 * np.arcsin(ratio)), (0,), controls=clock, control_states=bits, label=f"CRY_{k}")
    return c.compose(inverse(qpe), reg)


def hhl(problem: LinearSystemProblem, m_bits: int = 4, C: float | None = None, t0: float | None = None) -> SolveReport:
    """HHL in statevector mode; postselects the ancilla on 1 and the clock on zero.

    ``C`` may not exceed any eigenvalue estimate that carries clock probability
    ``>= LEAK_FLOOR``; rarer (leakage) clock values get a saturated rotation and
    their total probability is reported as ``saturated_clock_mass``.

    Defaults: ``C = 1/kappa_bound`` and ``t0 = 2 pi (1 - 2^-m) / lambda_max_bound``.
    """
    if not is_hermitian(problem.A):
        raise InputError("HHL needs a Hermitian matrix")
    if m_bits < 1:
        raise InputError("need at least one clock bit")
    A = pad_matrix(problem.A)
    lam_max = float(problem.alpha_bound) if problem.alpha_bound else float(np.linalg.norm(problem.A, 2))
    t0 = hhl_default_t0(lam_max, m_bits) if t0 is None else float(t0)
    C = 1.0 / problem.kappa_bound if C is None else float(C)
    n_sys = A.shape[0].bit_length() - 1
    rhs = np.zeros(A.shape[0], dtype=complex)
    rhs[: problem.n] = problem.b
    b_state = amplitude_encode(rhs)
    # clock distribution after QPE decides which rotations are reachable
    qpe_state = run(qpe_circuit(exact_unitary(A, -t0), m_bits), kron(zero_state(m_bits), b_state))
    clock_probs = qpe_state.probabilities().reshape(2**m_bits, -1).sum(axis=1)
    circuit = hhl_circuit(A, m_bits, C, t0, clock_probs)
    out = run(circuit, kron(zero_state(1 + m_bits), b_state))
    post, prob = postselect(out.amplitudes, circuit.num_qubits, range(1 + m_bits), (1,) + (0,) * m_bits)
    k = np.arange(1, 2**m_bits)
    saturated = C * 2**m_bits * t0 / (2 * np.pi * k) > 1
    return _extract(post, (0, problem.n), prob, "hhl", m_bits, problem,
                    {"C": C, "t0": t0, "saturated_clock_mass": float(clock_probs[1:][saturated].sum())})
