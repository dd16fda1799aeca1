import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from qsci.circuit import (Circuit, Histogram, apply, endianness_convert, inverse, measure,
                          outcome_probability, run, sample, unitary)
from qsci.circuit import GateOp
from qsci.errors import InputError
from qsci.gates import X, Z, controlled, embed, is_unitary, rx, rz, standard_gate
from qsci.kernels import apply_matrix
from qsci.statevector import StateVector, basis_embed, basis_state, zero_state

from oracles import random_state, random_unitary

S2 = 1 / np.sqrt(2)


def bell() -> Circuit:
    return Circuit(2).h(0).cx(0, 1)


def test_standard_gate_examples():
    assert np.array_equal(standard_gate("X") @ [1, 0], [0, 1])
    assert np.allclose(standard_gate("H") @ [1, 0], [S2, S2])
    t = 0.7
    assert np.max(np.abs(standard_gate("RX", [2 * t]) - expm(-1j * t * X))) <= 1e-12


def test_unknown_gate():
    with pytest.raises(InputError):
        standard_gate("FOO")
    with pytest.raises(InputError):
        standard_gate("RX")


@pytest.mark.parametrize("name, params", [("I", ()), ("X", ()), ("Y", ()), ("Z", ()), ("H", ()), ("S", ()),
                                          ("T", ()), ("SWAP", ()), ("CX", ()), ("TOFFOLI", ()),
                                          ("RX", (0.3,)), ("RY", (1.1,)), ("RZ", (-2.0,)), ("P", (0.4,))])
def test_standard_gates_unitary(name, params):
    assert is_unitary(standard_gate(name, params))


def test_controlled_examples():
    cx = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    assert np.array_equal(controlled(X, 1, (1,)), cx)
    assert np.array_equal(controlled(np.eye(2), 1, (0,)), np.eye(4))
    toffoli = np.eye(8)
    toffoli[6:, 6:] = [[0, 1], [1, 0]]
    assert np.array_equal(controlled(X, 2, "11"), toffoli)


def test_open_control():
    # control on |0>: X acts on the target only when the control is 0
    c = Circuit(2).cx(0, 1, ctrl_state=0)
    assert np.allclose(run(c).amplitudes, basis_embed("01").amplitudes)
    assert np.allclose(run(c, basis_embed("10")).amplitudes, basis_embed("10").amplitudes)


def test_apply_example_eq9():
    s = zero_state(3)
    s = apply(s, GateOp("H", (0,)))
    s = apply(s, GateOp("X", (2,)))
    expected = np.zeros(8)
    expected[0b001] = expected[0b101] = S2
    assert np.allclose(s.amplitudes, expected)


def test_apply_identity_and_range():
    s = StateVector(random_state(np.random.default_rng(0), 3))
    assert np.allclose(apply(s, GateOp("I", (1,))).amplitudes, s.amplitudes)
    with pytest.raises(InputError):
        apply(s, GateOp("X", (3,)))


def test_run_examples():
    assert np.allclose(run(bell()).amplitudes, [S2, 0, 0, S2])
    uniform = run(Circuit(3).h([0, 1, 2]))
    assert np.allclose(uniform.amplitudes, np.full(8, 1 / np.sqrt(8)))
    s = StateVector(random_state(np.random.default_rng(1), 2))
    assert np.array_equal(run(Circuit(2), s).amplitudes, s.amplitudes)


def test_run_rejects_measurement():
    with pytest.raises(InputError):
        run(bell().measure())


def test_measure_examples_eq15_eq16():
    s = StateVector(np.full(4, 0.5))
    out, p, post = measure(s, 0, outcome=0)
    assert out == 0 and p == pytest.approx(0.5)
    assert np.allclose(post.amplitudes, [S2, S2, 0, 0])
    out, p, post = measure(s, 0, outcome=1)
    assert p == pytest.approx(0.5)
    assert np.allclose(post.amplitudes, [0, 0, S2, S2])
    out, p, post = measure(zero_state(1), 0, seed=3)
    assert (out, p) == (0, 1.0)
    assert np.array_equal(post.amplitudes, [1, 0])


def test_sample_examples():
    h = sample(bell().measure(), 5120, seed=11)
    assert set(h.counts) <= {"00", "11"}
    assert abs(h.counts["00"] - 2560) < 4 * np.sqrt(5120 * 0.25)
    h = sample(Circuit(3).h([0, 1, 2]).measure(), 2**15, seed=5)
    assert len(h.counts) == 8
    assert all(abs(c - 4096) < 4 * np.sqrt(2**15 / 8) for c in h.counts.values())
    h = sample(Circuit(1).x(0).measure(), 100, seed=0)
    assert h.counts == {"1": 100}


def test_sample_partial_measurement_order():
    # qubit 2 is |1>, qubit 0 is |0>; reading (2, 0) gives "10"
    c = Circuit(3).x(2).measure([2, 0])
    assert sample(c, 10, seed=0).counts == {"10": 10}


def test_sample_rejects_mid_circuit_measurement():
    c = Circuit(1).measure()
    c.x(0)
    with pytest.raises(InputError):
        sample(c, 10)


def test_sample_reproducible_across_workers():
    c = Circuit(4).h([0, 1, 2, 3]).measure()
    a = sample(c, 200_000, seed=42, workers=1)
    b = sample(c, 200_000, seed=42, workers=4)
    assert a.counts == b.counts
    assert sample(c, 200_000, seed=42).counts == a.counts
    assert sample(c, 200_000, seed=43).counts != a.counts


def test_inverse_examples():
    assert inverse(Circuit(1).h(0)).ops[0].name == "H"
    op = inverse(Circuit(1).rz(0.4, 0)).ops[0]
    assert op.name == "RZ" and op.params == (-0.4,)
    phi = run(bell())
    assert np.allclose(run(inverse(bell()), phi).amplitudes, [1, 0, 0, 0])
    with pytest.raises(InputError):
        inverse(bell().measure())


def test_endianness_convert():
    assert endianness_convert("011", 3) == "110"
    assert endianness_convert("010", 3) == "010"
    assert endianness_convert(endianness_convert("0111", 4), 4) == "0111"
    assert endianness_convert(1, 3) == 4
    h = Histogram(3, {"01": 2, "11": 1})
    back = endianness_convert(endianness_convert(h, 2), 2)
    assert back.counts == h.counts and back.bit_order == h.bit_order
    with pytest.raises(InputError):
        endianness_convert("01", 3)


@pytest.mark.parametrize("a, b, c", [(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)])
def test_toffoli_reversible_logic(a, b, c):
    out = run(Circuit(3).toffoli(0, 1, 2), basis_state(4 * a + 2 * b + c, 3))
    idx = int(np.argmax(np.abs(out.amplitudes)))
    ta, tb, tc = idx >> 2, (idx >> 1) & 1, idx & 1
    assert (ta, tb) == (a, b)
    assert tc == c ^ (a & b)
    if c == 1:
        assert tc == 1 - (a & b)  # NAND
    if b == 1 and c == 0:
        assert tc == a  # FANOUT


def _random_circuit(rng, n, depth):
    c = Circuit(n)
    for _ in range(depth):
        kind = rng.integers(5)
        q = [int(x) for x in rng.permutation(n)]
        if kind == 0:
            c.h(q[0])
        elif kind == 1:
            c.rx(float(rng.normal()), q[0])
        elif kind == 2 and n > 1:
            c.cx(q[0], q[1], int(rng.integers(2)))
        elif kind == 3 and n > 1:
            c.unitary_gate(random_unitary(rng, 4), (q[0], q[1]))
        else:
            c.add("T", q[0])
    return c


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_inverse_round_trip(seed, n):
    rng = np.random.default_rng(seed)
    c = _random_circuit(rng, n, 12)
    s = StateVector(random_state(rng, n))
    back = run(inverse(c), run(c, s))
    assert np.max(np.abs(back.amplitudes - s.amplitudes)) <= 1e-9


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6), st.integers(1, 2), st.integers(0, 2))
def test_kernel_matches_dense_embedding(seed, n, k, nc):
    rng = np.random.default_rng(seed)
    if k + nc > n:
        return
    q = [int(x) for x in rng.permutation(n)]
    targets, controls = q[:k], q[k:k + nc]
    states = tuple(int(b) for b in rng.integers(0, 2, nc))
    g = random_unitary(rng, 2**k)
    psi = random_state(rng, n)
    fast = apply_matrix(psi, n, g, targets, controls, states)
    dense = embed(g, targets, n, controls, states) @ psi
    assert np.max(np.abs(fast - dense)) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_norm_and_measurement_completeness(seed, n):
    rng = np.random.default_rng(seed)
    s = StateVector(random_state(rng, n))
    for op in _random_circuit(rng, n, 8).ops:
        s = apply(s, op)
        assert abs(np.linalg.norm(s.amplitudes) - 1) <= 1e-10
        for q in range(n):
            total = outcome_probability(s, q, 0) + outcome_probability(s, q, 1)
            assert abs(total - 1) <= 1e-10


def test_circuit_unitary_matches_dense_product():
    rng = np.random.default_rng(7)
    c = _random_circuit(rng, 3, 10)
    dense = np.eye(8, dtype=complex)
    for op in c.ops:
        dense = embed(op.gate_matrix(), op.targets, 3, op.controls, op.control_states or None) @ dense
    assert np.max(np.abs(unitary(c) - dense)) <= 1e-12


def test_rotation_convention():
    assert np.allclose(rz(0.5), expm(-0.25j * Z))
    assert np.allclose(rx(0.5), expm(-0.25j * X))


def test_circuit_json_round_trip():
    c = bell().measure()
    c2 = Circuit.from_dict(c.to_dict())
    assert [o.name for o in c2.ops] == [o.name for o in c.ops]
    assert np.allclose(run(Circuit(2, c2.ops[:-1])).amplitudes, run(bell()).amplitudes)
