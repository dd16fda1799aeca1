"""Circuits, execution, projective measurement and sampled readout."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import gates
from .errors import InputError
from .kernels import apply_matrix, check_indices
from .statevector import StateVector, zero_state

MEASURE = "MEASURE"
UNITARY = "UNITARY"
BIT_ORDER = "big-endian"

_SELF_INVERSE = {"I", "X", "Y", "Z", "H", "SWAP", "TOFFOLI", "CX"}
_ADJOINT_NAME = {"S": "SDG", "SDG": "S", "T": "TDG", "TDG": "T"}
_NEGATE_PARAM = {"RX", "RY", "RZ", "P"}


@dataclass(frozen=True, eq=False)
class GateOp:
    """One gate application (or a measurement marker when ``name == "MEASURE"``)."""

    name: str
    targets: tuple
    params: tuple = ()
    controls: tuple = ()
    control_states: tuple = ()
    matrix: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "name", self.name.upper())
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        states = tuple(int(s) for s in self.control_states) or (1,) * len(self.controls)
        if len(states) != len(self.controls):
            raise InputError("one control state per control qubit")
        object.__setattr__(self, "control_states", states)
        if set(self.targets) & set(self.controls):
            raise InputError("targets and controls must be disjoint")
        if self.matrix is not None:
            m = np.array(self.matrix, dtype=complex)
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)

    @property
    def is_measurement(self) -> bool:
        return self.name == MEASURE

    def gate_matrix(self) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix
        return gates.standard_gate(self.name, self.params)

    def dagger(self) -> "GateOp":
        if self.is_measurement:
            raise InputError("measurements are not reversible")
        kw = dict(targets=self.targets, controls=self.controls, control_states=self.control_states)
        if self.matrix is not None:
            return GateOp(self.name, params=self.params, matrix=self.matrix.conj().T, **kw)
        if self.name in _SELF_INVERSE:
            return GateOp(self.name, **kw)
        if self.name in _ADJOINT_NAME:
            return GateOp(_ADJOINT_NAME[self.name], **kw)
        if self.name in _NEGATE_PARAM:
            return GateOp(self.name, params=tuple(-p for p in self.params), **kw)
        raise InputError(f"no adjoint rule for gate {self.name}")

    def to_dict(self) -> dict:
        d = {"name": self.name, "params": list(self.params), "targets": list(self.targets),
             "controls": list(self.controls), "control_states": list(self.control_states)}
        if self.matrix is not None:
            d["matrix"] = [[[z.real, z.imag] for z in row] for row in self.matrix]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GateOp":
        matrix = None
        if d.get("matrix") is not None:
            matrix = np.array([[complex(re, im) for re, im in row] for row in d["matrix"]])
        return cls(d["name"], tuple(d["targets"]), tuple(d.get("params", ())),
                   tuple(d.get("controls", ())), tuple(d.get("control_states", ())), matrix)


@dataclass
class Circuit:
    """Ordered gate list on ``num_qubits`` qubits; ops run left to right in time."""

    num_qubits: int
    ops: list = field(default_factory=list)

    def __post_init__(self):
        if self.num_qubits < 1:
            raise InputError("a circuit needs at least one qubit")
        for op in self.ops:
            self._check(op)
        self.ops = list(self.ops)

    def _check(self, op: GateOp):
        check_indices(self.num_qubits, op.targets, op.controls)

    def append(self, op: GateOp) -> "Circuit":
        self._check(op)
        self.ops.append(op)
        return self

    def add(self, name, targets, params=(), controls=(), control_states=()) -> "Circuit":
        if isinstance(targets, int):
            targets = (targets,)
        if isinstance(controls, int):
            controls = (controls,)
        return self.append(GateOp(name, tuple(targets), tuple(params), tuple(controls), tuple(control_states)))

    def unitary_gate(self, matrix, targets, controls=(), control_states=(), label=UNITARY) -> "Circuit":
        return self.append(GateOp(label, tuple(targets), (), tuple(controls), tuple(control_states), matrix))

    # thin builders for the common gates
    def h(self, q):
        for t in np.atleast_1d(q):
            self.add("H", int(t))
        return self

    def x(self, q):
        return self.add("X", q)

    def y(self, q):
        return self.add("Y", q)

    def z(self, q):
        return self.add("Z", q)

    def s(self, q):
        return self.add("S", q)

    def rx(self, theta, q):
        return self.add("RX", q, (theta,))

    def ry(self, theta, q):
        return self.add("RY", q, (theta,))

    def rz(self, theta, q):
        return self.add("RZ", q, (theta,))

    def p(self, lam, q):
        return self.add("P", q, (lam,))

    def cx(self, control, target, ctrl_state=1):
        return self.add("X", target, controls=(control,), control_states=(ctrl_state,))

    def cp(self, lam, control, target):
        return self.add("P", target, (lam,), controls=(control,))

    def swap(self, a, b):
        return self.add("SWAP", (a, b))

    def toffoli(self, a, b, target):
        return self.add("X", target, controls=(a, b))

    def measure(self, qubits=None):
        qubits = range(self.num_qubits) if qubits is None else np.atleast_1d(qubits)
        return self.append(GateOp(MEASURE, tuple(int(q) for q in qubits)))

    def compose(self, other: "Circuit", qubits=None) -> "Circuit":
        """Append ``other``'s ops, optionally remapping its qubit ``i`` to ``qubits[i]``."""
        mapping = list(range(other.num_qubits)) if qubits is None else list(qubits)
        if len(mapping) != other.num_qubits:
            raise InputError("qubit map must cover the composed circuit")
        out = Circuit(self.num_qubits, list(self.ops))
        for op in other.ops:
            out.append(GateOp(op.name, tuple(mapping[t] for t in op.targets), op.params,
                              tuple(mapping[c] for c in op.controls), op.control_states, op.matrix))
        return out

    @property
    def has_measurements(self) -> bool:
        return any(op.is_measurement for op in self.ops)

    def __len__(self):
        return len(self.ops)

    def to_dict(self) -> dict:
        return {"num_qubits": self.num_qubits, "bit_order": BIT_ORDER,
                "ops": [op.to_dict() for op in self.ops]}

    @classmethod
    def from_dict(cls, d: dict) -> "Circuit":
        return cls(int(d["num_qubits"]), [GateOp.from_dict(o) for o in d["ops"]])


def apply(state: StateVector, op: GateOp) -> StateVector:
    """Left-multiply ``state`` by ``op`` embedded on its target and control qubits."""
    if op.is_measurement:
        raise InputError("use measure() for measurement markers")
    out = apply_matrix(state.amplitudes, state.num_qubits, op.gate_matrix(), op.targets,
                       op.controls, op.control_states)
    return StateVector.from_array(out)


def _evolve(amps: np.ndarray, n: int, ops) -> np.ndarray:
    for op in ops:
        if op.is_measurement:
            raise InputError("circuit contains measurements; use sample() instead")
        amps = apply_matrix(amps, n, op.gate_matrix(), op.targets, op.controls, op.control_states)
    return amps


def run(circuit: Circuit, initial: StateVector | None = None) -> StateVector:
    """Apply every op of a measurement-free circuit in order."""
    if initial is None:
        initial = zero_state(circuit.num_qubits)
    if initial.num_qubits != circuit.num_qubits:
        raise InputError("initial state width does not match the circuit")
    return StateVector.from_array(_evolve(initial.amplitudes, circuit.num_qubits, circuit.ops))


def unitary(circuit: Circuit) -> np.ndarray:
    """The circuit's ``2**n`` unitary, evolving all basis columns at once."""
    n = circuit.num_qubits
    return _evolve(np.eye(2**n, dtype=complex), n, circuit.ops)


def inverse(circuit: Circuit) -> Circuit:
    """Adjoint circuit: daggered gates in reverse order."""
    if circuit.has_measurements:
        raise InputError("measurements are not reversible")
    return Circuit(circuit.num_qubits, [op.dagger() for op in reversed(circuit.ops)])


def outcome_probability(state: StateVector, qubit: int, outcome: int) -> float:
    n = state.num_qubits
    check_indices(n, (qubit,))
    probs = state.probabilities().reshape((2,) * n)
    return float(np.sum(np.take(probs, outcome, axis=qubit)))


def measure(state: StateVector, qubit: int, seed=None, outcome: int | None = None):
    """Projective Z measurement of one qubit.

    Returns ``(outcome, probability, post_state)``. ``outcome`` may be forced to
    inspect a specific branch; otherwise it is drawn from ``seed``.
    """
    n = state.num_qubits
    check_indices(n, (qubit,))
    p1 = outcome_probability(state, qubit, 1)
    p1 = min(max(p1, 0.0), 1.0)
    if outcome is None:
        rng = np.random.default_rng(seed)
        outcome = int(rng.random() < p1)
    prob = p1 if outcome == 1 else 1.0 - p1
    if prob <= 0:
        raise InputError(f"outcome {outcome} has zero probability")
    t = state.amplitudes.reshape((2,) * n).copy()
    index = [slice(None)] * n
    index[qubit] = 1 - outcome
    t[tuple(index)] = 0
    return outcome, prob, StateVector.from_array(t.reshape(-1) / np.sqrt(prob))


@dataclass
class Histogram:
    """Shot counts keyed by big-endian bitstrings of the measured qubits."""

    shots: int
    counts: dict
    bit_order: str = BIT_ORDER

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise InputError("counts do not sum to shots")

    def frequencies(self) -> dict:
        return {k: v / self.shots for k, v in self.counts.items()}

    def most_frequent(self) -> str:
        return max(sorted(self.counts), key=self.counts.get)

    def to_dict(self) -> dict:
        return {"shots": self.shots, "bit_order": self.bit_order, "counts": dict(sorted(self.counts.items()))}

    @classmethod
    def from_dict(cls, d: dict) -> "Histogram":
        return cls(int(d["shots"]), {str(k): int(v) for k, v in d["counts"].items()}, d.get("bit_order", BIT_ORDER))


_CHUNK = 1 << 16  # multiple of 4 so Philox blocks align with chunk boundaries


def _shot_uniforms(seed: int, start: int, count: int) -> np.ndarray:
    # Uniform for shot i depends only on (seed, i): Philox output i of key=seed.
    bitgen = np.random.Philox(key=int(seed))
    bitgen.advance(start // 4)
    return np.random.Generator(bitgen).random(count)


def sample_probabilities(probs: np.ndarray, shots: int, seed: int = 0, workers: int = 1) -> np.ndarray:
    """Draw ``shots`` outcome indices from ``probs``; identical for any ``workers``."""
    if shots < 1:
        raise InputError("shots must be positive")
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    starts = list(range(0, shots, _CHUNK))

    def draw(start):
        u = _shot_uniforms(seed, start, min(_CHUNK, shots - start))
        return np.minimum(np.searchsorted(cdf, u, side="right"), len(cdf) - 1)

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(draw, starts))
    else:
        parts = [draw(s) for s in starts]
    return np.concatenate(parts)


def sample(circuit: Circuit, shots: int, seed: int = 0, initial: StateVector | None = None,
           workers: int = 1) -> Histogram:
    """Run the unitary part of ``circuit`` and sample its terminal measurements.

    Measurement markers must form the tail of the circuit; without any marker all
    qubits are read out.
    """
    n = circuit.num_qubits
    first = next((i for i, op in enumerate(circuit.ops) if op.is_measurement), len(circuit.ops))
    tail = circuit.ops[first:]
    if any(not op.is_measurement for op in tail):
        raise InputError("mid-circuit measurement is not supported by sample()")
    measured = []
    for op in tail:
        measured.extend(q for q in op.targets if q not in measured)
    if not measured:
        measured = list(range(n))
    state = run(Circuit(n, circuit.ops[:first]), initial)
    probs = state.probabilities().reshape((2,) * n)
    rest = tuple(q for q in range(n) if q not in measured)
    marginal = np.sum(probs, axis=rest) if rest else probs
    marginal = np.transpose(marginal, np.argsort(np.argsort(measured))).reshape(-1) if len(measured) > 1 else marginal.reshape(-1)
    idx = sample_probabilities(marginal, shots, seed, workers)
    values, counts = np.unique(idx, return_counts=True)
    width = len(measured)
    return Histogram(shots, {format(int(v), f"0{width}b"): int(c) for v, c in zip(values, counts)})


def endianness_convert(obj, n: int):
    """Reverse bit labels of a histogram, bitstring or basis index of width ``n``."""
    if isinstance(obj, Histogram):
        counts = {endianness_convert(k, n): v for k, v in obj.counts.items()}
        order = "little-endian" if obj.bit_order == BIT_ORDER else BIT_ORDER
        return Histogram(obj.shots, counts, order)
    if isinstance(obj, str):
        if len(obj) != n:
            raise InputError(f"label {obj!r} does not have width {n}")
        return obj[::-1]
    index = int(obj)
    if not 0 <= index < 2**n:
        raise InputError(f"basis index {index} out of range for width {n}")
    return int(format(index, f"0{n}b")[::-1], 2)
