"""Translation-invariant states: Fermi shells, paired profiles, the
momentum-space energy functional, and the ground-state scan."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hfbdyn.lattice import LatticeSpec, named_potential
from hfbdyn.quasifree import purity_residual
from hfbdyn.solver import hfb_energy
from hfbdyn.titorus import (TISymbol, admissible_shell_counts, ffg_symbol,
                            ground_state_scan, hfb_energy_ti, lambda_state,
                            pairing_bound_check, random_ti_state,
                            shell_profile)


@pytest.fixture
def lat():
    return LatticeSpec(dimension=1, cutoff=3, spin_count=2,
                       particle_counts=(3, 3))


def test_admissible_counts_1d(lat):
    # |k|^2 levels on {-3..3}: 0,1,1,4,4,9,9 -> shells close at 1,3,5,7
    assert admissible_shell_counts(lat) == [1, 3, 5, 7]


def test_ffg_closed_shell(lat):
    sym, chem = ffg_symbol(lat)
    assert np.array_equal(sym.spin_counts(), [3, 3])
    assert np.abs(sym.alpha_hat).max() == 0.0
    # occupations are 0/1 indicators of |k|^2 <= k_F^2
    assert set(np.unique(sym.omega_hat)) <= {0.0, 1.0}
    assert chem.fermi_momentum_sq[0] == pytest.approx(1.5)
    g = sym.assemble()
    assert purity_residual(g) <= 1e-14
    assert g.particle_number == pytest.approx(6.0)


def test_ffg_open_shell_rejected(lat):
    with pytest.raises(ValueError, match="open shell"):
        ffg_symbol(lat, (2, 2))


def test_shell_profile_sums_and_interpolates(lat):
    lam = shell_profile(lat, 3)
    assert lam.sum() == pytest.approx(3.0, abs=1e-12)
    assert lam.min() >= 0.0 and lam.max() <= 1.0
    # strictly between 0 and 1 near the Fermi surface
    assert ((lam > 1e-6) & (lam < 1 - 1e-6)).any()
    with pytest.raises(ValueError):
        shell_profile(lat, 0)
    with pytest.raises(ValueError):
        shell_profile(lat, 7)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 6), st.floats(0.2, 1.5))
def test_shell_profile_even_and_normalized(n_sigma, width):
    lat = LatticeSpec(dimension=1, cutoff=3, spin_count=2,
                      particle_counts=(n_sigma, n_sigma))
    lam = shell_profile(lat, n_sigma, width=width)
    assert lam.sum() == pytest.approx(n_sigma, abs=1e-10)
    moms = lat.momenta()
    index = {tuple(k): i for i, k in enumerate(moms)}
    for i, k in enumerate(moms):
        j = index[tuple(-c for c in k)]
        assert lam[i] == pytest.approx(lam[j], abs=1e-12)


def test_lambda_state_validations(lat):
    lam = shell_profile(lat, 3)
    sym, g = lambda_state(lat, lam)
    assert purity_residual(g) <= 1e-12
    assert g.particle_number == pytest.approx(6.0)
    assert np.abs(g.alpha + g.alpha.T).max() <= 1e-14
    with pytest.raises(ValueError, match="sums to"):
        lambda_state(lat, lam * 0.9)
    bad = lam.copy()
    k1 = {tuple(k): i for i, k in enumerate(lat.momenta())}
    bad[k1[(1,)]] += 0.1
    bad[k1[(0,)]] -= 0.1
    with pytest.raises(ValueError, match="not even"):
        lambda_state(lat, bad)


def test_ti_energy_matches_matrix_energy(lat):
    V = named_potential("attractive-gaussian", {"v0": -0.5, "sigma": 1.5}, lat)
    n_ref = float(lat.total_particles)
    for sym, g in [lambda_state(lat, shell_profile(lat, 3)),
                   (ffg_symbol(lat)[0], ffg_symbol(lat)[0].assemble())]:
        e_sym = hfb_energy_ti(sym, V, n_ref=n_ref)
        e_mat = hfb_energy(g, V, lat, n_ref=n_ref)
        assert e_sym == pytest.approx(e_mat, abs=1e-12)


def test_random_ti_state_properties(lat):
    rng = np.random.default_rng(31)
    for _ in range(25):
        sym = random_ti_state(lat, rng)
        assert isinstance(sym, TISymbol)
        assert np.allclose(sym.spin_counts(), lat.particle_counts, atol=1e-9)
        g = sym.assemble()
        assert purity_residual(g) <= 1e-9


def test_random_ti_state_unbalanced_counts():
    lat = LatticeSpec(dimension=1, cutoff=3, spin_count=2,
                      particle_counts=(3, 1))
    rng = np.random.default_rng(8)
    for _ in range(25):
        sym = random_ti_state(lat, rng)
        assert np.allclose(sym.spin_counts(), (3, 1), atol=1e-9)
        assert purity_residual(sym.assemble()) <= 1e-9


def test_ground_state_scan_gaps_nonnegative():
    lat = LatticeSpec(dimension=1, cutoff=3, spin_count=2,
                      particle_counts=(3, 1))
    V = named_potential("attractive-gaussian", {"v0": -0.3, "sigma": 1.2}, lat)
    out = ground_state_scan(lat, V, trials=100, seed=2)
    assert out["trials"] == 100
    assert out["min_gap"] >= -1e-9
    assert out["ffg_self_gap"] == 0.0
    assert out["max_gap"] >= out["mean_gap"] >= out["min_gap"]


def test_pairing_bound_rows():
    def build(lattice):
        return named_potential("gaussian", {"v0": -0.3, "sigma": 1.2}, lattice)

    rows = pairing_bound_check([(1, 3, 1), (1, 4, 3)], build)
    assert [row["N"] for row in rows] == [2, 6]
    for row in rows:
        assert row["alpha_ratio"] > 0.0
        assert row["grad_ratio"] > 0.0
        assert row["s1_ratio"] > 0.0
        assert np.isfinite(row["energy"])
