"""Shared builders for the test suite."""

import numpy as np
import pytest

from hfbdyn.lattice import LatticeSpec, PotentialSpec, named_potential
from hfbdyn.quasifree import GeneralizedDensityMatrix, random_bogoliubov


def make_slater(lattice: LatticeSpec, fills) -> GeneralizedDensityMatrix:
    """Slater determinant filling the given momenta per spin.

    fills: one sequence of momentum tuples (or scalars in d=1) per spin.
    """
    L = lattice.dim
    om = np.zeros((L, L), dtype=complex)
    for s, ks in enumerate(fills):
        for k in ks:
            i = lattice.flat_index(k, s)
            om[i, i] = 1.0
    return GeneralizedDensityMatrix(om, np.zeros((L, L), dtype=complex))


def zero_potential(lattice: LatticeSpec) -> PotentialSpec:
    return PotentialSpec(fourier_coefficients={},
                         particle_number=lattice.total_particles)


@pytest.fixture
def small_lattice():
    """d=1, K=1, two spins, half filling: L=6 modes, Fock dim 64."""
    return LatticeSpec(dimension=1, cutoff=1, spin_count=2,
                       particle_counts=(1, 1))


@pytest.fixture
def small_potential(small_lattice):
    return named_potential("gaussian", {"v0": -0.4, "sigma": 1.5},
                           small_lattice)


@pytest.fixture
def random_pure_state():
    def _make(L, seed):
        return random_bogoliubov(L, seed).state()
    return _make
