"""Exact Fock-space backend: CAR algebra, second quantization, state
preparation, and reduced matrices."""

import numpy as np
import pytest

from hfbdyn.lattice import LatticeSpec, named_potential
from hfbdyn.quasifree import (ANNIHILATE, CREATE, BogoliubovMap, FillFactor,
                              OperatorSymbol, PairFactor, random_bogoliubov)
from hfbdyn.fock import (FockVector, annihilator, build_hamiltonian, creator,
                         evolve_exact, gaussian_prepare, monomial_expectation,
                         number_moment, pairing1, rdm1, reduced_state,
                         second_quantize)


def test_car_algebra_small():
    L = 3
    eye = np.eye(1 << L)
    for i in range(L):
        for j in range(L):
            ai, aj = annihilator(L, i), annihilator(L, j)
            ci = creator(L, i)
            anti = (ai.toarray() @ creator(L, j).toarray()
                    + creator(L, j).toarray() @ ai.toarray())
            assert np.allclose(anti, eye * (i == j))
            assert np.abs((ai @ aj + aj @ ai).toarray()).max() == 0.0
            assert np.allclose(ci.toarray(), annihilator(L, i).toarray().T)


def test_mode_limit_guard():
    with pytest.raises(ValueError):
        annihilator(17, 0)


def test_vacuum_and_number_moments():
    vac = FockVector.vacuum(4)
    assert number_moment(vac, 1) == pytest.approx(1.0)  # <(N+1)^1> on vacuum
    filled = BogoliubovMap.from_factors([FillFactor(i) for i in range(4)], 4)
    psi = gaussian_prepare(filled)
    assert number_moment(psi, 1) == pytest.approx(5.0)
    assert number_moment(psi, 2) == pytest.approx(25.0)


def test_second_quantize_matches_rdm_trace():
    b = random_bogoliubov(5, 4)
    psi = gaussian_prepare(b)
    rng = np.random.default_rng(0)
    O = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    val = psi.expectation(second_quantize(O))
    assert val == pytest.approx(np.trace(O @ rdm1(psi)), abs=1e-11)


def test_gaussian_prepare_roundtrip():
    for seed in (0, 1, 2):
        b = random_bogoliubov(6, seed)
        g = b.state()
        psi = gaussian_prepare(b)
        assert np.abs(psi.amplitudes @ np.conj(psi.amplitudes) - 1) <= 1e-12
        assert np.abs(rdm1(psi) - g.omega).max() <= 1e-12
        assert np.abs(pairing1(psi) - g.alpha).max() <= 1e-12
        red = reduced_state(psi)
        assert np.abs(red.omega - g.omega).max() <= 1e-12


def test_pair_factor_prepares_bcs_amplitudes():
    theta = 0.4
    b = BogoliubovMap.from_factors([PairFactor(theta, (0, 1))], 2)
    psi = gaussian_prepare(b)
    # cos(theta)|00> + sin(theta)|11> in the two-mode basis
    assert abs(psi.amplitudes[0b00]) == pytest.approx(np.cos(theta))
    assert abs(psi.amplitudes[0b11]) == pytest.approx(np.sin(theta))
    assert np.abs(psi.amplitudes[0b01]) <= 1e-14
    assert np.abs(psi.amplitudes[0b10]) <= 1e-14


def test_monomial_expectation_number_operator():
    b = random_bogoliubov(4, 6)
    psi = gaussian_prepare(b)
    g = b.state()
    for i in range(4):
        ops = [OperatorSymbol(CREATE, i), OperatorSymbol(ANNIHILATE, i)]
        assert monomial_expectation(psi, ops) == pytest.approx(
            g.omega[i, i], abs=1e-12)


def test_hamiltonian_hermitian_and_number_conserving():
    lat = LatticeSpec(dimension=1, cutoff=1, spin_count=2,
                      particle_counts=(1, 1))
    V = named_potential("gaussian", {"v0": -0.4, "sigma": 1.5}, lat)
    H = build_hamiltonian(lat, V).toarray()
    assert np.abs(H - H.conj().T).max() <= 1e-12
    Nop = second_quantize(np.eye(lat.dim)).toarray()
    assert np.abs(H @ Nop - Nop @ H).max() <= 1e-10


def test_evolve_exact_unitary_and_energy_conserving():
    lat = LatticeSpec(dimension=1, cutoff=1, spin_count=2,
                      particle_counts=(1, 1))
    V = named_potential("gaussian", {"v0": -0.4, "sigma": 1.5}, lat)
    H = build_hamiltonian(lat, V)
    psi0 = gaussian_prepare(random_bogoliubov(lat.dim, 12))
    e0 = psi0.expectation(H)
    psi1 = evolve_exact(psi0, H, 0.7, lat.epsilon)
    assert np.linalg.norm(psi1.amplitudes) == pytest.approx(1.0, abs=1e-12)
    assert psi1.expectation(H) == pytest.approx(e0, abs=1e-10)
    # composition: two half steps equal one full step
    psi_half = evolve_exact(evolve_exact(psi0, H, 0.35, lat.epsilon),
                            H, 0.35, lat.epsilon)
    assert np.abs(psi_half.amplitudes - psi1.amplitudes).max() <= 1e-10
