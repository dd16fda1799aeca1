"""Standard gate matrices and controlled versions.

Rotations follow ``R_P(theta) = exp(-i theta P / 2)``, so ``rx(2 t)`` is
``exp(-i t X)``.
"""
from __future__ import annotations

import numpy as np

from .errors import InputError

UNITARY_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.array([[1, 0], [0, 1j]], dtype=complex)
T = np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)

PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}


def rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def phase(lam: float) -> np.ndarray:
    """diag(1, e^{i lam}); the controlled-phase building block of the QFT."""
    return np.diag([1.0, np.exp(1j * lam)])


_FIXED = {
    "I": I2, "X": X, "Y": Y, "Z": Z, "H": H, "S": S, "SDG": S.conj().T,
    "T": T, "TDG": T.conj().T, "SWAP": SWAP,
}
_PARAMETRIC = {"RX": rx, "RY": ry, "RZ": rz, "P": phase}

# name -> (number of target qubits, number of parameters)
GATE_ARITY = {name: (m.shape[0].bit_length() - 1, 0) for name, m in _FIXED.items()}
GATE_ARITY.update({name: (1, 1) for name in _PARAMETRIC})
GATE_ARITY["TOFFOLI"] = (3, 0)
GATE_ARITY["CX"] = (2, 0)


def standard_gate(name: str, params=()) -> np.ndarray:
    """Matrix of a named gate. Names are case-insensitive; angles are radians."""
    key = name.upper()
    params = tuple(params)
    if key in _FIXED:
        if params:
            raise InputError(f"gate {name} takes no parameters")
        return _FIXED[key].copy()
    if key in _PARAMETRIC:
        if len(params) != 1:
            raise InputError(f"gate {name} takes exactly one angle")
        return _PARAMETRIC[key](float(params[0]))
    if key == "CX":
        return controlled(X, 1)
    if key == "TOFFOLI":
        return controlled(X, 2)
    raise InputError(f"unknown gate {name!r}")


def controlled(gate: np.ndarray, num_controls: int = 1, control_states=None) -> np.ndarray:
    """Block form ``|s><s| (x) gate + (I - |s><s|) (x) I`` with controls first.

    ``control_states`` holds one bit per control; 0 is the open-circle convention.
    """
    gate = np.asarray(gate, dtype=complex)
    if num_controls < 1:
        raise InputError("need at least one control")
    if control_states is None:
        control_states = (1,) * num_controls
    if isinstance(control_states, str):
        control_states = tuple(int(c) for c in control_states)
    if len(control_states) != num_controls:
        raise InputError("one control state per control qubit")
    d = gate.shape[0]
    nc = 2**num_controls
    out = np.eye(nc * d, dtype=complex)
    s = int("".join(str(int(b)) for b in control_states), 2)
    out[s * d:(s + 1) * d, s * d:(s + 1) * d] = gate
    return out


def is_unitary(mat, tol: float = UNITARY_TOL) -> bool:
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        return False
    return bool(np.max(np.abs(mat.conj().T @ mat - np.eye(mat.shape[0]))) <= tol)


def embed(gate: np.ndarray, targets, n: int, controls=(), control_states=None) -> np.ndarray:
    """Full ``2**n`` matrix of ``gate`` on ``targets`` (n <= 10).

    Built as ``kron(local, I)`` in the qubit order (controls, targets, rest) and then
    conjugated by the basis permutation; kept independent of the state kernels so
    it can serve as their reference.
    """
    if n > 10:
        raise InputError("dense embedding is limited to 10 qubits")
    controls, targets = list(controls), list(targets)
    local = controlled(gate, len(controls), control_states) if controls else np.asarray(gate, dtype=complex)
    rest = [q for q in range(n) if q not in controls + targets]
    order = controls + targets + rest
    ordered = np.kron(local, np.eye(2 ** len(rest)))
    # position p in ``order`` holds qubit order[p]; map ordered index -> natural index
    idx = np.arange(2**n)
    bits = (idx[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1
    natural = np.zeros(2**n, dtype=int)
    for p, q in enumerate(order):
        natural |= bits[:, p] << (n - 1 - q)
    full = np.zeros((2**n, 2**n), dtype=complex)
    full[np.ix_(natural, natural)] = ordered
    return full
