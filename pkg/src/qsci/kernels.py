"""Bit-index kernels applying small gates to large state arrays without forming 2^n matrices."""
from __future__ import annotations

import numpy as np

from .errors import InputError


def check_indices(n: int, targets, controls=()):
    qubits = list(targets) + list(controls)
    if not targets:
        raise InputError("gate needs at least one target")
    if any(q < 0 or q >= n for q in qubits):
        raise InputError(f"qubit index out of range for width {n}: {qubits}")
    if len(set(qubits)) != len(qubits):
        raise InputError(f"targets and controls must be distinct: {qubits}")


def apply_matrix(psi, n: int, gate, targets, controls=(), control_states=None) -> np.ndarray:
    """Apply ``gate`` to qubits ``targets`` of ``psi`` (shape ``(2**n,)`` or ``(2**n, batch)``).

    Controls fix a slice of the tensor; the gate contracts with the target axes of
    that slice only. Returns a new array.
    """
    targets = tuple(int(t) for t in targets)
    controls = tuple(int(c) for c in controls)
    check_indices(n, targets, controls)
    if control_states is None:
        control_states = (1,) * len(controls)
    k = len(targets)
    gate = np.asarray(gate, dtype=complex)
    if gate.shape != (2**k, 2**k):
        raise InputError(f"gate of shape {gate.shape} does not act on {k} qubits")
    psi = np.asarray(psi, dtype=complex)
    batch = psi.shape[1:]
    tensor = psi.reshape((2,) * n + batch)
    index = [slice(None)] * tensor.ndim
    for c, s in zip(controls, control_states):
        index[c] = int(s)
    index = tuple(index)
    sub = tensor[index]
    # axes of the control-fixed slice that correspond to the targets
    taxes = [t - sum(1 for c in controls if c < t) for t in targets]
    g = gate.reshape((2,) * (2 * k))
    moved = np.tensordot(g, sub, axes=(list(range(k, 2 * k)), taxes))
    moved = np.moveaxis(moved, list(range(k)), taxes)
    out = tensor.copy()
    out[index] = moved
    return out.reshape(psi.shape)


def apply_diagonal(psi, n: int, diag, targets) -> np.ndarray:
    """Multiply by a diagonal gate given as its diagonal vector on ``targets``."""
    targets = tuple(targets)
    check_indices(n, targets)
    k = len(targets)
    psi = np.asarray(psi, dtype=complex)
    batch = psi.shape[1:]
    shape = [1] * n
    for t in targets:
        shape[t] = 2
    d = np.asarray(diag, dtype=complex).reshape((2,) * k)
    order = np.argsort(targets)
    d = np.transpose(d, order).reshape(shape + [1] * len(batch))
    return (psi.reshape((2,) * n + batch) * d).reshape(psi.shape)


def permute_qubits(psi, n: int, order) -> np.ndarray:
    """Reorder qubits so that new qubit ``i`` is old qubit ``order[i]``."""
    psi = np.asarray(psi)
    batch = psi.shape[1:]
    t = psi.reshape((2,) * n + batch)
    t = np.transpose(t, list(order) + list(range(n, n + len(batch))))
    return t.reshape(psi.shape)
