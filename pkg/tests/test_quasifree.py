"""Gaussian-state algebra: purity, factored maps, canonical decomposition,
and the Wick contraction engine."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hfbdyn.quasifree import (ANNIHILATE, CREATE, BogoliubovMap, FillFactor,
                              GeneralizedDensityMatrix, OneBodyFactor,
                              OperatorSymbol, PairFactor, bloch_messiah,
                              from_gamma, gamma_matrix, kparticle_rdm,
                              purity_residual, random_bogoliubov, two_point,
                              wick_correlation)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 7), st.integers(0, 10 ** 6))
def test_random_state_is_pure_and_antisymmetric(L, seed):
    b = random_bogoliubov(L, seed)
    assert b.relation_residual() <= 1e-12
    g = b.state()
    assert purity_residual(g) <= 1e-12
    assert np.abs(g.alpha + g.alpha.T).max() <= 1e-12
    ev = np.linalg.eigvalsh(g.omega)
    assert ev.min() >= -1e-12 and ev.max() <= 1 + 1e-12


def test_gamma_roundtrip():
    g = random_bogoliubov(5, 0).state()
    G = gamma_matrix(g)
    L = g.dim
    assert np.allclose(G[:L, :L], g.omega)
    assert np.allclose(G[:L, L:], g.alpha)
    assert np.allclose(G[L:, L:], np.eye(L) - g.omega.conj())
    g2 = from_gamma(G)
    assert np.allclose(g2.omega, g.omega) and np.allclose(g2.alpha, g.alpha)


def test_vacuum_and_filled_states():
    L = 4
    vac = BogoliubovMap.identity(L).state()
    assert np.abs(vac.omega).max() == 0.0 and np.abs(vac.alpha).max() == 0.0
    filled = BogoliubovMap.from_factors([FillFactor(i) for i in range(L)], L)
    g = filled.state()
    assert np.allclose(g.omega, np.eye(L))
    assert np.abs(g.alpha).max() <= 1e-14


def test_pair_factor_state():
    theta = 0.3
    b = BogoliubovMap.from_factors([PairFactor(theta, (0, 1))], 3)
    g = b.state()
    s, c = np.sin(theta), np.cos(theta)
    assert g.omega[0, 0] == pytest.approx(s * s)
    assert g.omega[1, 1] == pytest.approx(s * s)
    assert g.omega[2, 2] == pytest.approx(0.0)
    assert g.alpha[0, 1] == pytest.approx(s * c)
    assert g.alpha[1, 0] == pytest.approx(-s * c)


def test_one_body_factor_generator_antihermitian():
    rng = np.random.default_rng(3)
    M = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    Q, _ = np.linalg.qr(M)
    gen = OneBodyFactor(Q).generator()
    assert np.allclose(gen, -gen.conj().T, atol=1e-12)
    # the generator exponentiates back to the rotation
    from scipy.linalg import expm
    assert np.allclose(expm(gen), Q, atol=1e-10)


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 6), st.integers(0, 10 ** 6))
def test_bloch_messiah_reconstructs_state(L, seed):
    g = random_bogoliubov(L, seed).state()
    b = bloch_messiah(g)
    g2 = b.state()
    assert np.abs(g2.omega - g.omega).max() <= 1e-9
    assert np.abs(g2.alpha - g.alpha).max() <= 1e-9
    assert b.relation_residual() <= 1e-9
    assert b.factored_residual() <= 1e-9


def test_bloch_messiah_on_slater():
    om = np.diag([1.0, 1.0, 0.0, 0.0]).astype(complex)
    g = GeneralizedDensityMatrix(om, np.zeros((4, 4), complex))
    b = bloch_messiah(g)
    g2 = b.state()
    assert np.abs(g2.omega - om).max() <= 1e-12
    assert np.abs(g2.alpha).max() <= 1e-12


def test_two_point_table():
    g = random_bogoliubov(4, 8).state()
    a0, a1 = OperatorSymbol(ANNIHILATE, 0), OperatorSymbol(ANNIHILATE, 1)
    c0, c1 = OperatorSymbol(CREATE, 0), OperatorSymbol(CREATE, 1)
    assert two_point(g, c1, a0) == pytest.approx(g.omega[0, 1])
    assert two_point(g, a1, a0) == pytest.approx(g.alpha[0, 1])
    assert two_point(g, a0, c0) == pytest.approx(1 - g.omega[0, 0])
    assert two_point(g, a0, c1) == pytest.approx(-g.omega[0, 1])
    assert two_point(g, c0, c1) == pytest.approx(np.conj(g.alpha[0, 1]))


def test_wick_rejects_odd_monomial():
    g = random_bogoliubov(4, 1).state()
    ops = [OperatorSymbol(CREATE, 0), OperatorSymbol(ANNIHILATE, 1),
           OperatorSymbol(ANNIHILATE, 0)]
    with pytest.raises(ValueError):
        wick_correlation(g, ops)


def test_wick_car_consistency():
    # <a_i a*_j + a*_j a_i> = delta_ij must hold inside the Wick engine
    g = random_bogoliubov(5, 9).state()
    for i in range(5):
        for j in range(5):
            ai, cj = OperatorSymbol(ANNIHILATE, i), OperatorSymbol(CREATE, j)
            val = wick_correlation(g, [ai, cj]) + wick_correlation(g, [cj, ai])
            assert val == pytest.approx(1.0 if i == j else 0.0, abs=1e-12)


def test_kparticle_rdm_shapes_and_trace():
    g = random_bogoliubov(4, 2).state()
    r1 = kparticle_rdm(g, 1)
    assert r1.shape == (4, 4)
    assert np.allclose(r1, g.omega)
    r2 = kparticle_rdm(g, 2)
    assert r2.shape == (4, 4, 4, 4)
    # fermionic antisymmetry in the particle slots and Hermiticity
    assert np.allclose(r2, -np.transpose(r2, (1, 0, 2, 3)), atol=1e-12)
    assert np.allclose(r2, -np.transpose(r2, (0, 1, 3, 2)), atol=1e-12)
    assert np.allclose(r2, np.conj(np.transpose(r2, (2, 3, 0, 1))),
                       atol=1e-12)
    # diagonal occupation probabilities are real and non-negative
    diag = np.einsum("xyxy->xy", r2)
    assert np.abs(diag.imag).max() <= 1e-12
    assert diag.real.min() >= -1e-12
    with pytest.raises(ValueError):
        kparticle_rdm(g, 4)


def test_purity_residual_detects_mixed_state():
    L = 3
    om = np.diag([0.5, 0.0, 0.0]).astype(complex)
    g = GeneralizedDensityMatrix(om, np.zeros((L, L), complex))
    assert purity_residual(g) > 0.1
