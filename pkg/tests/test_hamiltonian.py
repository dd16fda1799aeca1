import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsci.circuit import Circuit, run, unitary
from qsci.encodings import PauliSum, block_encode_hermitian, pauli_decompose
from qsci.errors import InputError, ToleranceError
from qsci.gates import X, Z, is_unitary
from qsci.hamiltonian import (A2_STEPS, HamiltonianSpec, default_taylor_order, exact_unitary, pauli_string_exp,
                              positive_shift, qsp_sim, taylor_operator, taylor_sim, trotter1, trotter2,
                              trotter_error, trotter_error_sweep, trotter_unitary)
from qsci.polynomials import jacobi_anger
from qsci.statevector import StateVector, fidelity, zero_state

from oracles import expm_minus_i, pauli_matrix, random_hermitian, random_state

XZ = PauliSum([(1, "X"), (1, "Z")])
PLUS = StateVector([2**-0.5, 2**-0.5])


def test_trotter1_gate_sequence():
    c = trotter1(HamiltonianSpec(XZ, t=2.0, r=4))
    assert [(o.name, o.params) for o in c.ops[:2]] == [("RX", (1.0,)), ("RZ", (1.0,))]
    assert len(c) == 8


def test_trotter_commuting_terms_exact():
    ps = PauliSum([(0.7, "ZI"), (-1.3, "IZ")])
    for r in (1, 3, 10):
        spec = HamiltonianSpec(ps, t=1.7, r=r)
        assert trotter_error(spec, 1) <= 1e-12
        assert trotter_error(spec, 2) <= 1e-12


def test_trotter2_single_term_exact():
    spec = HamiltonianSpec(PauliSum([(0.4, "XY")]), t=2.0, r=1)
    assert trotter_error(spec, 2) <= 1e-12


def test_trotter2_beats_trotter1_small_t():
    spec = HamiltonianSpec(XZ, t=0.1, r=1)
    assert trotter_error(spec, 2) / trotter_error(spec, 1) < 0.1


def test_trotter_rejects_complex_coefficients():
    spec = HamiltonianSpec(matrix=np.array([[0, -1j], [1j, 0]]))
    spec.pauli_sum = PauliSum([(1j, "Z")])
    with pytest.raises(InputError):
        trotter1(spec)
    with pytest.raises(InputError):
        HamiltonianSpec(PauliSum([(1j, "X")]))


def test_trotter_unitary_matches_circuit():
    spec = HamiltonianSpec(PauliSum([(0.3, "XX"), (0.5, "ZI"), (-0.2, "YZ")]), t=1.0, r=5)
    assert np.allclose(trotter_unitary(spec, 1), unitary(trotter1(spec)), atol=1e-12)
    assert np.allclose(trotter_unitary(spec, 2), unitary(trotter2(spec)), atol=1e-12)


def _slope(r, e):
    return np.polyfit(np.log(r), np.log(e), 1)[0]


def test_trotter_sweep_scaling():
    rows = np.array(trotter_error_sweep(XZ))
    assert len(rows) == 2 * 5 * len(A2_STEPS)
    for order, lo, hi in ((1, -1.2, -0.8), (2, -2.2, -1.8)):
        for t in range(1, 6):
            sel = rows[(rows[:, 2] == order) & (rows[:, 0] == t)]
            assert lo <= _slope(sel[:, 1], sel[:, 3]) <= hi
            assert np.all(np.diff(sel[:, 3]) <= 1e-15)


def test_trotter_includes_identity_phase():
    ps = PauliSum([(2.0, "I"), (1, "X"), (1, "Z")])
    spec = HamiltonianSpec(ps, t=1.0, r=2000)
    assert trotter_error(spec, 2) < 1e-6


@pytest.mark.parametrize("labels", ["Z", "X", "Y", "ZZ", "XY", "YIZ", "XXYZ", "IZI"])
def test_pauli_string_exp(labels):
    theta = 0.3
    U = unitary(pauli_string_exp(labels, theta))
    assert np.max(np.abs(U - expm_minus_i(pauli_matrix(labels), theta))) <= 1e-12


def test_pauli_string_exp_shapes():
    c = pauli_string_exp("Z", 0.4)
    assert [(o.name, o.params) for o in c.ops] == [("RZ", (0.8,))]
    c = pauli_string_exp("X", 0.4)
    assert [o.name for o in c.ops] == ["H", "RZ", "H"]
    with pytest.raises(InputError):
        pauli_string_exp("II", 0.1)


def test_exact_unitary_examples():
    assert np.allclose(exact_unitary(np.zeros((2, 2)), 3.0), np.eye(2))
    assert np.allclose(exact_unitary(X, np.pi / 2), -1j * X)
    spec = HamiltonianSpec(XZ, t=1.0, r=10000)
    assert np.linalg.norm(trotter_unitary(spec, 2) - exact_unitary(X + Z, 1.0), 2) <= 1e-6
    with pytest.raises(InputError):
        exact_unitary(np.array([[0, 1], [0, 0]]), 1.0)


def test_taylor_examples():
    spec = HamiltonianSpec(PauliSum([(1, "X")]), t=0.5, r=1, K=14)
    psi = StateVector(random_state(np.random.default_rng(0), 1))
    out, p = taylor_sim(spec, psi)
    expected = expm_minus_i(X, 0.5) @ psi.amplitudes
    assert np.max(np.abs(out.amplitudes - expected)) <= 1e-10
    assert np.max(np.abs(taylor_operator(spec) - expm_minus_i(X, 0.5))) <= 1e-10
    out, p = taylor_sim(HamiltonianSpec(XZ, t=0.0), psi)
    assert p == pytest.approx(1) and np.allclose(out.amplitudes, psi.amplitudes)


def test_taylor_superpolynomial_decay():
    H = pauli_decompose(random_hermitian(np.random.default_rng(4), 4) / 4)
    errs = []
    for K in range(1, 9):
        spec = HamiltonianSpec(H, t=1.0, r=2, K=K)
        errs.append(np.linalg.norm(taylor_operator(spec) - expm_minus_i(spec.dense(), 1.0), 2))
    logs = np.log(errs)
    assert np.all(np.diff(logs) < 0)
    # slope against log K keeps steepening
    slopes = np.diff(logs) / np.diff(np.log(np.arange(1, 9)))
    assert np.all(np.diff(slopes) < 0)


def test_default_taylor_order():
    K = default_taylor_order(0.5, 1e-10)
    from math import factorial

    assert 0.5 ** (K + 1) / factorial(K + 1) <= 1e-10 < 0.5**K / factorial(K)


def test_qsp_sim_z():
    be = block_encode_hermitian(Z, 1.0)
    out, p = qsp_sim(be, 1.0, 1e-6, PLUS)
    exact = StateVector(expm_minus_i(Z, 1.0) @ PLUS.amplitudes)
    assert 1 - fidelity(out, exact) <= 1e-6
    cs, ss = jacobi_anger(2.0, 1e-6)
    scale = cs.meta["scale"]
    assert p == pytest.approx(scale**2 / (cs.one_norm + ss.one_norm) ** 2, rel=1e-5)
    out, _ = qsp_sim(be, 0.0, 1e-6, PLUS)
    assert fidelity(out, PLUS) == pytest.approx(1, abs=1e-12)


def test_qsp_sim_degree_cap():
    with pytest.raises(ToleranceError):
        qsp_sim(block_encode_hermitian(Z, 1.0), 50.0, 1e-6, PLUS, max_degree=20)


def test_positive_shift():
    rng = np.random.default_rng(2)
    A = random_hermitian(rng, 4)
    be = block_encode_hermitian(A, 2 * np.linalg.norm(A, 2))
    sh = positive_shift(be)
    assert np.allclose(sh.block(), (A / be.alpha + np.eye(4)) / 2)
    assert np.all(np.linalg.eigvalsh(sh.block()) >= -1e-12)


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.floats(0.1, 2.0))
def test_routes_agree_with_exact(seed, n, t):
    rng = np.random.default_rng(seed)
    Hm = random_hermitian(rng, 2**n)
    Hm = Hm / np.linalg.norm(Hm, 2)
    psi = StateVector(random_state(rng, n))
    exact = StateVector(exact_unitary(Hm, t) @ psi.amplitudes)
    eps = 1e-8
    out, p = taylor_sim(HamiltonianSpec(matrix=Hm, t=t, r=2, eps=eps), psi)
    assert 0 < p <= 1 and abs(np.linalg.norm(out.amplitudes) - 1) <= 1e-10
    assert 1 - fidelity(out, exact) <= 1e-7
    out, p = qsp_sim(block_encode_hermitian(Hm, 1.0), t, eps, psi)
    assert 0 < p <= 1
    assert 1 - fidelity(out, exact) <= 1e-7


def test_spec_validation():
    with pytest.raises(InputError):
        HamiltonianSpec()
    with pytest.raises(InputError):
        HamiltonianSpec(matrix=np.array([[0, 1], [0, 0]]))
    with pytest.raises(InputError):
        HamiltonianSpec(XZ, r=0)
    spec = HamiltonianSpec(matrix=X + Z)
    assert spec.paulis().coefficients() == pytest.approx({"X": 1, "Z": 1})
