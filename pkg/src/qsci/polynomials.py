"""Qubitization, Chebyshev matrix polynomials and quantum signal processing.

Signal operators alternate ``U`` and ``Z_Pi U^dagger Z_Pi``; for the one-ancilla
rotation form of a Hermitian matrix both equal ``U``, and for any block-encoding
the top-left block of the ``k``-step product is ``T_k`` of the encoded matrix.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.special import jv

from .encodings import BlockEncoding, apply_block_encoding, block_encode_matrix
from .errors import InputError, PostselectionError, ToleranceError
from .statevector import StateVector, kron, zero_state
from .subroutines import POSTSELECT_FLOOR

BOUND_TOL = 1e-9
_GRID = np.cos(np.linspace(0, np.pi, 4001))


def _parity_of(coefficients, tol=0.0) -> str:
    c = np.asarray(coefficients)
    odd = np.any(np.abs(c[1::2]) > tol)
    even = np.any(np.abs(c[0::2]) > tol)
    if odd and even:
        return "mixed"
    return "odd" if odd else "even"


@dataclass
class ChebyshevSeries:
    """``sum_k c_k T_k(x)`` with real coefficients."""

    coefficients: np.ndarray
    parity: str | None = None
    domain: str = "[-1, 1]"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coefficients, dtype=float))
        if c.size == 0:
            raise InputError("series needs at least one coefficient")
        self.coefficients = c
        actual = _parity_of(c)
        if self.parity is None:
            self.parity = actual
        elif self.parity not in ("even", "odd", "mixed"):
            raise InputError(f"unknown parity {self.parity!r}")
        elif self.parity != "mixed" and actual not in (self.parity,) and np.any(c):
            raise InputError(f"coefficients are {actual}, not {self.parity}")

    @property
    def degree(self) -> int:
        return self.coefficients.size - 1

    @property
    def one_norm(self) -> float:
        return float(np.sum(np.abs(self.coefficients)))

    def __call__(self, x):
        return C.chebval(x, self.coefficients)

    def sup_norm(self) -> float:
        """Max of ``|P|`` over a dense Chebyshev-point grid on [-1, 1]."""
        return float(np.max(np.abs(self(_GRID))))

    def scaled(self, factor: float) -> "ChebyshevSeries":
        return ChebyshevSeries(self.coefficients * factor, self.parity, self.domain, dict(self.meta))

    def to_dict(self) -> dict:
        return {"coefficients": self.coefficients.tolist(), "parity": self.parity, "domain": self.domain, **self.meta}

    @classmethod
    def from_dict(cls, d: dict) -> "ChebyshevSeries":
        meta = {k: v for k, v in d.items() if k not in ("coefficients", "parity", "domain")}
        return cls(np.asarray(d["coefficients"], dtype=float), d.get("parity"), d.get("domain", "[-1, 1]"), meta)


@dataclass
class PhaseSequence:
    """QSP angles ``phi_0 .. phi_d`` plus what they were fitted for."""

    phases: np.ndarray
    parity: str | None = None
    target: str = ""
    kappa: float | None = None
    eps: float | None = None

    def __post_init__(self):
        self.phases = np.atleast_1d(np.asarray(self.phases, dtype=float))
        if self.phases.size == 0:
            raise InputError("phase sequence is empty")
        if self.parity is not None and self.parity not in ("even", "odd"):
            raise InputError(f"phase parity must be even or odd, got {self.parity!r}")

    @property
    def degree(self) -> int:
        return self.phases.size - 1

    def check_parity(self):
        implied = "even" if self.degree % 2 == 0 else "odd"
        if self.parity is not None and self.parity != implied:
            raise InputError(f"{self.phases.size} phases give a {implied} polynomial, file declares {self.parity}")

    def to_dict(self) -> dict:
        return {"phases": self.phases.tolist(), "parity": self.parity, "target": self.target,
                "kappa": self.kappa, "eps": self.eps}

    @classmethod
    def from_dict(cls, d: dict) -> "PhaseSequence":
        if "phases" not in d:
            raise InputError("phase file has no 'phases' field")
        return cls(np.asarray(d["phases"], dtype=float), d.get("parity"), d.get("target", ""),
                   d.get("kappa"), d.get("eps"))


def reflection_zpi(m: int, n: int = 0) -> np.ndarray:
    """``(2|0^m><0^m| - I) x I_{2^n}``."""
    if m < 1:
        raise InputError("reflection needs at least one ancilla")
    d = -np.ones(2**m)
    d[0] = 1.0
    return np.diag(np.repeat(d, 2**n)).astype(complex)


def _zpi_diag(be: BlockEncoding) -> np.ndarray:
    d = -np.ones(2**be.num_ancillas)
    d[0] = 1.0
    return np.repeat(d, be.sys_dim)


def _signal_steps(be: BlockEncoding):
    """The two alternating signal operators ``U`` and ``Z_Pi U^dagger Z_Pi``."""
    if be.num_ancillas < 1:
        raise InputError("qubitization needs at least one ancilla")
    U = be.unitary
    z = _zpi_diag(be)
    return U, (z[:, None] * U.conj().T) * z[None, :]


def qubitization_power(be: BlockEncoding, k: int) -> BlockEncoding:
    """Block-encoding of ``T_k(A/alpha)`` built from ``k`` alternating signal steps."""
    if k < 0:
        raise InputError("power must be nonnegative")
    odd, even = _signal_steps(be)
    W = np.eye(be.unitary.shape[0], dtype=complex)
    for j in range(k):
        W = (odd if j % 2 == 0 else even) @ W
    d = be.sys_dim
    return BlockEncoding(W, be.num_ancillas, be.num_system, 1.0, W[:d, :d].copy())


def _chebyshev_vectors(be: BlockEncoding, degree: int, vectors: np.ndarray):
    """Yield ``T_j(A/alpha) @ vectors`` for j = 0..degree via the signal steps."""
    odd, even = _signal_steps(be)
    d = be.sys_dim
    v = np.zeros((be.unitary.shape[0],) + vectors.shape[1:], dtype=complex)
    v[:d] = vectors
    yield v[:d]
    for j in range(degree):
        v = (odd if j % 2 == 0 else even) @ v
        yield v[:d]


def _check_bound(series: ChebyshevSeries):
    sup = series.sup_norm()
    if sup > 1 + BOUND_TOL:
        raise InputError(f"series magnitude {sup:.6g} exceeds 1 on [-1, 1]")


def chebyshev_apply(be: BlockEncoding, series: ChebyshevSeries, state: StateVector):
    """Apply ``P(A/alpha) = sum c_k T_k(A/alpha)`` through one block-encoding of ``P``.

    ``P`` is assembled from the qubitized signal steps, block-encoded with
    subnormalization ``sum |c_k|`` and applied with postselection. Returns
    ``(P psi / ||P psi||, ||P psi||**2 / (sum |c_k|)**2)``.
    """
    if state.num_qubits != be.num_system:
        raise InputError("state width does not match the encoded matrix")
    return apply_block_encoding(chebyshev_block_encoding(be, series), state)


def chebyshev_matrix(be: BlockEncoding, series: ChebyshevSeries) -> np.ndarray:
    """Dense ``P(A/alpha)`` assembled column-wise from the signal steps."""
    eye = np.eye(be.sys_dim, dtype=complex)
    out = np.zeros_like(eye)
    for c, t in zip(series.coefficients, _chebyshev_vectors(be, series.degree, eye)):
        if c:
            out += c * t
    return out


def chebyshev_block_encoding(be: BlockEncoding, series: ChebyshevSeries) -> BlockEncoding:
    """Block-encoding of ``P(A/alpha)`` with subnormalization ``sum |c_k|``."""
    _check_bound(series)
    if series.one_norm == 0:
        raise PostselectionError("the zero polynomial has no block-encoding")
    return block_encode_matrix(chebyshev_matrix(be, series), series.one_norm)


def qsp_apply(be: BlockEncoding, phases: PhaseSequence, state: StateVector, extract_real: bool = False):
    """Interleave signal steps with ancilla phases ``e^{i phi_j Z_Pi}``.

    The realized operator is ``e^{i phi_0 Z} S e^{i phi_1 Z} ... S e^{i phi_d Z}``
    (rightmost first), whose top-left block is ``P(A/alpha)``. With
    ``extract_real`` an extra Hadamard-sandwiched qubit controls the sign of every
    phase, so postselecting it on 0 yields ``(P + P_{-phi}) / 2``, i.e. ``Re P``
    for real symmetric ``A``. Returns ``(post_state, success_probability)``.
    """
    if state.num_qubits != be.num_system:
        raise InputError("state width does not match the encoded matrix")
    phases.check_parity()
    odd, even = _signal_steps(be)
    z = _zpi_diag(be)
    d = be.sys_dim
    v0 = kron(zero_state(be.num_ancillas), state).amplitudes
    signs = (1.0, -1.0) if extract_real else (1.0,)
    branches = []
    for sgn in signs:
        v = v0.copy()
        phi = phases.phases
        for j in range(phases.degree, -1, -1):
            v = np.exp(1j * sgn * phi[j] * z) * v
            if j > 0:
                step = phases.degree - j
                v = (odd if step % 2 == 0 else even) @ v
        branches.append(v[:d])
    y = sum(branches) / len(branches)
    prob = min(1.0, float(np.vdot(y, y).real))
    if prob < POSTSELECT_FLOOR:
        raise PostselectionError(f"postselection probability {prob:.3e} vanished")
    return StateVector.from_array(y), prob


def qsp_response(phases, x, extract_real: bool = False):
    """Scalar polynomial realized by ``phases`` at points ``x`` (rotation-form signal)."""
    phases = np.asarray(phases.phases if isinstance(phases, PhaseSequence) else phases, dtype=float)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    s = np.sqrt(np.clip(1 - x**2, 0, None))
    out = []
    for sgn in ((1.0, -1.0) if extract_real else (1.0,)):
        # 2x2 product per point, applied to |0>
        a = np.exp(1j * sgn * phases[-1]) * np.ones_like(x, dtype=complex)
        b = np.zeros_like(a)
        for phi in phases[-2::-1]:
            a, b = x * a - s * b, s * a + x * b
            a, b = np.exp(1j * sgn * phi) * a, np.exp(-1j * sgn * phi) * b
        out.append(a)
    return sum(out) / len(out)


def _cheb_nodes(a: float, b: float, count: int) -> np.ndarray:
    k = np.arange(count)
    return (a + b) / 2 + (b - a) / 2 * np.cos((2 * k + 1) * np.pi / (2 * count))


def _basis_indices(degree: int, parity: str | None):
    if parity == "odd":
        return np.arange(1, degree + 1, 2)
    if parity == "even":
        return np.arange(0, degree + 1, 2)
    return np.arange(degree + 1)


def _lstsq_fit(x, target, degree, parity, weights=None):
    idx = _basis_indices(degree, parity)
    V = C.chebvander(x, degree)[:, idx]
    rhs = np.asarray(target, dtype=float)
    if weights is not None:
        V = V * weights[:, None]
        rhs = rhs * weights
    sol, *_ = np.linalg.lstsq(V, rhs, rcond=None)
    coef = np.zeros(degree + 1)
    coef[idx] = sol
    return coef


def chebyshev_fit(f, intervals=((-1.0, 1.0),), degree: int = 8, parity: str | None = None) -> ChebyshevSeries:
    """Fit ``f`` at Chebyshev nodes of each interval.

    A single interval [-1, 1] without parity constraint is plain interpolation;
    otherwise a least-squares fit over the union of node sets. The largest node
    residual is stored in ``meta["max_node_residual"]``.
    """
    intervals = [tuple(map(float, iv)) for iv in np.atleast_2d(np.asarray(intervals, dtype=float))]
    if len(intervals) == 1 and intervals[0] == (-1.0, 1.0) and parity is None:
        x = _cheb_nodes(-1.0, 1.0, degree + 1)
        fx = np.asarray(f(x), dtype=float)
        coef = np.linalg.solve(C.chebvander(x, degree), fx)
    else:
        per = max(degree + 1, 2 * len(_basis_indices(degree, parity)) // len(intervals) + 8)
        x = np.concatenate([_cheb_nodes(a, b, per) for a, b in intervals])
        fx = np.asarray(f(x), dtype=float)
        coef = _lstsq_fit(x, fx, degree, parity)
    if not np.all(np.isfinite(fx)):
        raise InputError("function is not finite on the fitting nodes")
    resid = float(np.max(np.abs(C.chebval(x, coef) - fx)))
    domain = " U ".join(f"[{a:g}, {b:g}]" for a, b in intervals)
    return ChebyshevSeries(coef, parity, domain, {"max_node_residual": resid})


def _search_degree(fit_at, start: int, step: int, max_degree: int):
    """Smallest degree (on the ``step`` lattice from ``start``) for which ``fit_at`` succeeds."""
    lo, hi = None, start
    while True:
        result = fit_at(hi)
        if result is not None:
            break
        lo = hi
        if hi >= max_degree:
            raise ToleranceError(f"no fit within degree cap {max_degree}")
        hi = min(max_degree, start + 2 * (hi - start) + step)
    best = (hi, result)
    while lo is not None and best[0] - lo > step:
        mid = lo + ((best[0] - lo) // (2 * step)) * step
        if mid in (lo, best[0]):
            break
        r = fit_at(mid)
        if r is not None:
            best = (mid, r)
        else:
            lo = mid
    return best


def _normalize_to_unit(coef: np.ndarray):
    sup = float(np.max(np.abs(C.chebval(_GRID, coef))))
    # dense sampling can miss the true maximum by a hair; keep a small margin
    gamma = 1.0 / (sup * (1 + 1e-9))
    return coef * gamma, gamma


def inverse_coeffs(kappa: float, eps: float, max_degree: int = 4001) -> ChebyshevSeries:
    """Odd series ``P ~ gamma / x`` on ``[-1, -1/kappa] U [1/kappa, 1]`` with ``max |P| <= 1``.

    Weighted least squares on Chebyshev nodes of ``[1/kappa, 1]`` minimizes the
    relative error ``|x P(x) - 1|``; the degree is the smallest odd one meeting
    ``eps`` on a dense grid. ``gamma`` lands in ``meta``.
    """
    if kappa <= 1:
        raise InputError("kappa must exceed 1")
    if not 0 < eps < 1:
        raise InputError("eps must lie in (0, 1)")
    a = 1.0 / kappa
    check = np.concatenate([_cheb_nodes(a, 1.0, 4000), np.linspace(a, 1.0, 2001)])

    def fit_at(degree):
        n_coef = (degree + 1) // 2
        x = _cheb_nodes(a, 1.0, 4 * n_coef + 40)
        coef = _lstsq_fit(x, 1.0 / x, degree, "odd", weights=x)
        err = np.max(np.abs(C.chebval(check, coef) * check - 1))
        return (coef, err) if err <= eps else None

    start = 2 * int(np.ceil(kappa / 2 * np.log(kappa / eps) / 4)) + 1
    degree, (coef, err) = _search_degree(fit_at, start, 2, max_degree)
    coef, gamma = _normalize_to_unit(coef)
    return ChebyshevSeries(coef, "odd", f"[-1, -{a:g}] U [{a:g}, 1]",
                           {"gamma": gamma, "kappa": kappa, "eps": eps, "relative_error": float(err),
                            "target": "inverse"})


def pd_inverse_coeffs(kappa: float, eps: float, max_degree: int = 4001) -> ChebyshevSeries:
    """Series ``Q(y) ~ gamma / (1 - y)`` on ``[-1, 1 - 1/kappa]`` with ``max |Q| <= 1`` on [-1, 1].

    Applied to ``B = I - eta A`` this gives ``A^{-1}`` up to scale; the degree grows
    like ``sqrt(kappa)``.
    """
    if kappa <= 1:
        raise InputError("kappa must exceed 1")
    if not 0 < eps < 1:
        raise InputError("eps must lie in (0, 1)")
    top = 1.0 - 1.0 / kappa
    check = np.concatenate([_cheb_nodes(-1.0, top, 4000), np.linspace(-1.0, top, 2001)])

    def fit_at(degree):
        x = _cheb_nodes(-1.0, top, 2 * degree + 40)
        coef = _lstsq_fit(x, 1.0 / (1.0 - x), degree, None, weights=1.0 - x)
        err = np.max(np.abs(C.chebval(check, coef) * (1 - check) - 1))
        return (coef, err) if err <= eps else None

    degree, (coef, err) = _search_degree(fit_at, 1, 1, max_degree)
    coef, gamma = _normalize_to_unit(coef)
    return ChebyshevSeries(coef, "mixed", f"[-1, {top:g}]",
                           {"gamma": gamma, "kappa": kappa, "eps": eps, "relative_error": float(err),
                            "target": "shifted-inverse"})


def jacobi_anger(t: float, eps: float):
    """Chebyshev series of ``cos(x t)`` and ``sin(x t)`` from Bessel weights.

    The cutoff ``k'`` is the smallest index whose discarded Bessel tail (both
    series) is at most ``eps / 4``; both series are then divided by ``1 + eps / 4``.
    Returns ``(cos_series, sin_series)``; ``k'`` is in each ``meta``.
    """
    if not 0 < eps < 1:
        raise InputError("eps must lie in (0, 1)")
    t = float(t)
    kmax = int(np.ceil(np.e * abs(t) / 2)) + 40
    while abs(jv(2 * kmax, t)) + abs(jv(2 * kmax + 1, t)) > 1e-300 and kmax < 10**5:
        if abs(jv(2 * kmax, t)) < 1e-30 and abs(jv(2 * kmax + 1, t)) < 1e-30:
            break
        kmax *= 2
    ks = np.arange(kmax + 2)
    weights = 2 * (np.abs(jv(2 * ks, t)) + np.abs(jv(2 * ks + 1, t)))
    # tail[k] = discarded mass when keeping indices 0..k
    tail = np.concatenate([np.cumsum(weights[::-1])[::-1][1:], [0.0]])
    kp = int(np.argmax(tail <= eps / 4))
    scale = 1.0 / (1.0 + eps / 4)
    cos_c = np.zeros(2 * kp + 1)
    cos_c[0] = jv(0, t)
    for k in range(1, kp + 1):
        cos_c[2 * k] = 2 * (-1) ** k * jv(2 * k, t)
    sin_c = np.zeros(2 * kp + 2)
    for k in range(kp + 1):
        sin_c[2 * k + 1] = 2 * (-1) ** k * jv(2 * k + 1, t)
    meta = {"k_prime": kp, "t": t, "eps": eps, "scale": scale}
    return (ChebyshevSeries(cos_c * scale, "even", "[-1, 1]", dict(meta, target="cos")),
            ChebyshevSeries(sin_c * scale, "odd", "[-1, 1]", dict(meta, target="sin")))
