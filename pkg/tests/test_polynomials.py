import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import chebyshev as C

from qsci.encodings import apply_block_encoding, block_encode_hermitian, block_encode_matrix
from qsci.errors import InputError, ToleranceError
from qsci.polynomials import (ChebyshevSeries, PhaseSequence, chebyshev_apply, chebyshev_fit, chebyshev_matrix,
                              inverse_coeffs, jacobi_anger, pd_inverse_coeffs, qsp_apply, qsp_response,
                              qubitization_power, reflection_zpi)
from qsci.statevector import StateVector, basis_embed, fidelity

from qsp_oracle import fit_phases, fit_phases_grid, phase_error
from oracles import random_hermitian, random_state


def cheb(k):
    c = np.zeros(k + 1)
    c[k] = 1
    return ChebyshevSeries(c)


def test_reflection_zpi():
    assert np.array_equal(reflection_zpi(1), np.diag([1, -1]))
    R = reflection_zpi(2, 1)
    assert np.array_equal(R @ R, np.eye(8))
    assert np.array_equal(np.diag(reflection_zpi(2)), [1, -1, -1, -1])


def test_qubitization_examples():
    A = np.diag([0.3, -0.8])
    be = block_encode_hermitian(A, 1.0)
    assert np.allclose(qubitization_power(be, 0).block(), np.eye(2))
    assert np.allclose(qubitization_power(be, 1).block(), A)
    be = block_encode_hermitian(np.diag([0.5, 0.5]), 1.0)
    assert np.allclose(qubitization_power(be, 2).block(), -0.5 * np.eye(2))


@pytest.mark.parametrize("encode", [block_encode_hermitian, block_encode_matrix])
def test_qubitization_chebyshev_identity(encode):
    a = np.array([0.9, -0.35, 0.1, -1.0, 0.62, 0.0, 0.77, -0.5])
    alpha = 1.0
    be = encode(np.diag(a), alpha)
    for k in range(33):
        blk = qubitization_power(be, k).block()
        assert np.max(np.abs(np.diag(blk) - np.cos(k * np.arccos(a)))) <= 1e-10
        assert np.max(np.abs(blk - np.diag(np.diag(blk)))) <= 1e-10


def test_qubitization_composition():
    a = np.array([0.9, -0.35, 0.1, -0.7])
    be = block_encode_hermitian(np.diag(a), 1.0)
    for j in range(1, 5):
        for k in range(1, 5):
            inner = qubitization_power(be, k)
            outer = qubitization_power(block_encode_hermitian(inner.block(), 1.0), j)
            assert np.allclose(outer.block(), qubitization_power(be, j * k).block(), atol=1e-10)


def test_chebyshev_apply_trivial_series():
    rng = np.random.default_rng(0)
    A = random_hermitian(rng, 4)
    be = block_encode_hermitian(A, 2 * np.linalg.norm(A, 2))
    psi = StateVector(random_state(rng, 2))
    s1, p1 = chebyshev_apply(be, ChebyshevSeries([0, 1]), psi)
    s2, p2 = apply_block_encoding(be, psi)
    assert p1 == pytest.approx(p2) and fidelity(s1, s2) == pytest.approx(1)
    s0, p0 = chebyshev_apply(be, ChebyshevSeries([1]), psi)
    assert p0 == pytest.approx(1) and np.allclose(s0.amplitudes, psi.amplitudes)


def test_chebyshev_matrix_matches_scalar_evaluation():
    rng = np.random.default_rng(3)
    coef = np.zeros(32)
    coef[1::2] = rng.normal(size=16) / np.arange(1, 17) ** 2
    series = ChebyshevSeries(coef)
    series = series.scaled(0.99 / series.sup_norm())
    assert series.degree == 31 and series.parity == "odd"
    a = np.linspace(-0.95, 0.95, 8)
    be = block_encode_hermitian(np.diag(a), 1.0)
    assert np.max(np.abs(np.diag(chebyshev_matrix(be, series)) - series(a))) <= 1e-9


def test_chebyshev_apply_rejects_large_series():
    be = block_encode_hermitian(np.diag([0.5, 0.2]), 1.0)
    with pytest.raises(InputError):
        chebyshev_apply(be, ChebyshevSeries([0, 1.5]), basis_embed("0"))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 12))
def test_chebyshev_success_probability(seed, degree):
    rng = np.random.default_rng(seed)
    A = random_hermitian(rng, 4)
    alpha = 1.2 * np.linalg.norm(A, 2)
    series = ChebyshevSeries(rng.normal(size=degree + 1))
    series = series.scaled(1 / max(series.sup_norm(), 1e-3))
    psi = random_state(rng, 2)
    w, V = np.linalg.eigh(A / alpha)
    P = (V * series(w)) @ V.conj().T
    v = P @ psi
    if np.linalg.norm(v) ** 2 / series.one_norm**2 < 1e-12:
        return
    state, p = chebyshev_apply(block_encode_hermitian(A, alpha), series, StateVector(psi))
    assert 0 <= p <= 1
    assert abs(p - np.linalg.norm(v) ** 2 / series.one_norm**2) <= 1e-10
    assert fidelity(state, StateVector.from_array(v)) == pytest.approx(1, abs=1e-10)


def test_qsp_trivial_phases():
    x = np.linspace(-1, 1, 41)
    assert np.allclose(qsp_response([0, 0], x), x)
    assert np.allclose(np.abs(qsp_response([np.pi / 2], x)), 1)
    rng = np.random.default_rng(1)
    A = random_hermitian(rng, 2)
    be = block_encode_hermitian(A, np.linalg.norm(A, 2) * 1.1)
    psi = StateVector(random_state(rng, 1))
    s, p = qsp_apply(be, PhaseSequence([0, 0]), psi)
    s2, p2 = apply_block_encoding(be, psi)
    assert p == pytest.approx(p2) and fidelity(s, s2) == pytest.approx(1)
    s, p = qsp_apply(be, PhaseSequence([np.pi / 2]), psi)
    assert p == pytest.approx(1) and fidelity(s, psi) == pytest.approx(1)


@pytest.mark.parametrize("d", [2, 4, 6, 8])
def test_qsp_zero_phases_give_chebyshev(d):
    # with all angles zero the bare product of signal steps has top-left T_d(a)
    a = np.linspace(-1, 1, 101)
    assert np.max(np.abs(qsp_response(np.zeros(d + 1), a) - np.cos(d * np.arccos(a)))) <= 1e-12


def test_qsp_parity_mismatch():
    be = block_encode_hermitian(np.diag([0.5, 0.2]), 1.0)
    with pytest.raises(InputError):
        qsp_apply(be, PhaseSequence([0.1, 0.2, 0.3], parity="odd"), basis_embed("0"))


def test_qsp_t7_matches_qubitization():
    target = cheb(7)
    phases = fit_phases_grid(target)
    assert phase_error(phases, target) <= 1e-8
    rng = np.random.default_rng(5)
    A = random_hermitian(rng, 4)
    be = block_encode_hermitian(A, 1.05 * np.linalg.norm(A, 2))
    psi = StateVector(random_state(rng, 2))
    s, p = qsp_apply(be, phases, psi, extract_real=True)
    s7, p7 = apply_block_encoding(qubitization_power(be, 7), psi)
    assert abs(p - p7) <= 1e-8
    assert np.max(np.abs(s.amplitudes - s7.amplitudes)) <= 1e-8 or fidelity(s, s7) >= 1 - 1e-8


def test_qsp_fitted_series_matches_chebyshev_apply():
    series = ChebyshevSeries([0, 0.4, 0, -0.2, 0, 0.1])
    phases = fit_phases(series)
    assert phase_error(phases, series) <= 1e-12
    rng = np.random.default_rng(9)
    A = random_hermitian(rng, 4)
    be = block_encode_hermitian(A, 1.3 * np.linalg.norm(A, 2))
    psi = StateVector(random_state(rng, 2))
    s1, p1 = qsp_apply(be, phases, psi, extract_real=True)
    s2, p2 = chebyshev_apply(be, series, psi)
    assert fidelity(s1, s2) == pytest.approx(1, abs=1e-10)
    assert p1 == pytest.approx(p2 * series.one_norm**2, rel=1e-8)


def test_chebyshev_fit_examples():
    s = chebyshev_fit(lambda x: np.cos(3 * np.arccos(x)), degree=8)
    assert np.allclose(s.coefficients, [0, 0, 0, 1, 0, 0, 0, 0, 0], atol=1e-14)
    s = chebyshev_fit(lambda x: x**2, degree=2)
    assert np.allclose(s.coefficients, [0.5, 0, 0.5], atol=1e-14)
    s = chebyshev_fit(np.cos, degree=12)
    x = np.linspace(-1, 1, 5001)
    assert np.max(np.abs(s(x) - np.cos(x))) < 1e-10


def test_chebyshev_fit_union_with_parity():
    s = chebyshev_fit(lambda x: 1 / x, [(-1, -0.5), (0.5, 1)], degree=21, parity="odd")
    assert np.all(s.coefficients[::2] == 0)
    x = np.linspace(0.5, 1, 101)
    assert np.max(np.abs(s(x) - 1 / x)) < 1e-4


@pytest.mark.parametrize("kappa, eps", [(2, 1e-3), (5, 1e-4), (20, 1e-6)])
def test_inverse_coeffs(kappa, eps):
    s = inverse_coeffs(kappa, eps)
    gamma = s.meta["gamma"]
    x = np.linspace(1 / kappa, 1, 20001)
    assert np.max(np.abs(s(x) * x / gamma - 1)) <= eps
    assert np.all(s.coefficients[::2] == 0) and s.parity == "odd"
    assert s.sup_norm() <= 1


def test_inverse_coeffs_degree_cap():
    with pytest.raises(ToleranceError):
        inverse_coeffs(50, 1e-8, max_degree=21)
    with pytest.raises(InputError):
        inverse_coeffs(1, 1e-3)


def test_pd_inverse_coeffs_lower_degree():
    s = pd_inverse_coeffs(100, 1e-3)
    y = np.linspace(-1, 1 - 1 / 100, 20001)
    assert np.max(np.abs(s(y) * (1 - y) / s.meta["gamma"] - 1)) <= 1e-3
    assert s.degree < inverse_coeffs(100, 1e-3).degree / 4


def test_jacobi_anger_examples():
    eps = 1e-6
    cs, ss = jacobi_anger(1.0, eps)
    x = np.linspace(-1, 1, 20001)
    assert np.max(np.abs(cs(x) - np.cos(x) / (1 + eps / 4))) <= eps
    assert np.max(np.abs(ss(x) - np.sin(x) / (1 + eps / 4))) <= eps
    assert cs.parity == "even" and ss.parity == "odd"
    assert cs.sup_norm() <= 1 and ss.sup_norm() <= 1
    c0, s0 = jacobi_anger(0.0, eps)
    assert c0.coefficients[0] == pytest.approx(1 / (1 + eps / 4))
    assert np.allclose(c0.coefficients[1:], 0) and np.allclose(s0.coefficients, 0)


@pytest.mark.parametrize("t", [0.5, 3.0, 10.0, 40.0])
def test_jacobi_anger_larger_times(t):
    cs, ss = jacobi_anger(t, 1e-8)
    x = np.linspace(-1, 1, 4001)
    scale = cs.meta["scale"]
    assert np.max(np.abs(cs(x) - scale * np.cos(x * t))) <= 1e-8
    assert np.max(np.abs(ss(x) - scale * np.sin(x * t))) <= 1e-8
    assert cs.meta["k_prime"] >= np.floor(np.e * t / 4) - 1


def test_series_and_phase_serialization():
    s = inverse_coeffs(3, 1e-3)
    back = ChebyshevSeries.from_dict(s.to_dict())
    assert np.array_equal(back.coefficients, s.coefficients) and back.meta["gamma"] == s.meta["gamma"]
    p = PhaseSequence([0.1, 0.2], "odd", "inverse", 4.0, 1e-3)
    assert PhaseSequence.from_dict(p.to_dict()).kappa == 4.0
    with pytest.raises(InputError):
        PhaseSequence.from_dict({"angles": [0.1]})
    with pytest.raises(InputError):
        ChebyshevSeries([0, 1, 1], parity="odd")


def test_bundled_phases_reproduce_inverse():
    from qsci.io import bundled, load_phases

    ph = load_phases(bundled("a3_phases.json"))
    assert ph.degree % 2 == 1 and "inv" in ph.target
    x = np.linspace(1 / ph.kappa, 1, 2001)
    y = qsp_response(ph, x, extract_real=True).real * x
    # constant up to the fitted relative error
    assert np.max(np.abs(y / y.mean() - 1)) <= 1e-8
