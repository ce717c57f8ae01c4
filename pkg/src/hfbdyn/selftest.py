"""Fast built-in invariant suites (seconds, not minutes): canonical
anticommutation relations, Wick-vs-exact agreement, purity transport, the
pairing-block identity, and the Fock-operator norm inequalities.

Deterministic: fixed seeds throughout, so a fresh checkout either passes or
fails identically everywhere.
"""

from __future__ import annotations

import numpy as np

from .lattice import LatticeSpec, named_potential, shift_operator
from .quasifree import (ANNIHILATE, CREATE, OperatorSymbol, random_bogoliubov,
                        wick_correlation)
from .fock import (FockVector, annihilator, creator, gaussian_prepare,
                   monomial_expectation, number_moment, second_quantize)
from .solver import evolve
from .diagnostics import subtle_identity_residual

__all__ = ["run_all"]


def _check_car(L: int = 4) -> str | None:
    eye = np.eye(1 << L)
    for i in range(L):
        for j in range(L):
            ai, aj = annihilator(L, i), annihilator(L, j)
            cj = creator(L, j)
            anti = (ai @ cj + cj @ ai).toarray()
            if not np.allclose(anti, eye * (i == j), atol=1e-13):
                return f"{{a_{i}, a*_{j}}} deviates from CAR"
            if np.abs((ai @ aj + aj @ ai).toarray()).max() > 1e-13:
                return f"{{a_{i}, a_{j}}} != 0"
    return None


def _check_wick(L: int = 6, n_monomials: int = 50) -> str | None:
    rng = np.random.default_rng(2024)
    b = random_bogoliubov(L, 3)
    psi = gaussian_prepare(b)
    g = b.state()
    for _ in range(n_monomials):
        n = int(rng.choice([2, 4, 6]))
        ops = [OperatorSymbol(str(rng.choice([CREATE, ANNIHILATE])),
                              int(rng.integers(L))) for _ in range(n)]
        w = wick_correlation(g, ops)
        e = monomial_expectation(psi, ops)
        if abs(w - e) > 1e-10:
            return f"Wick value off by {abs(w - e):.3e} on a {n}-point monomial"
    return None


def _check_purity_transport() -> str | None:
    lat = LatticeSpec(dimension=1, cutoff=1, spin_count=2, particle_counts=(1, 1))
    V = named_potential("gaussian", {"v0": -0.4, "sigma": 1.5}, lat)
    g0 = random_bogoliubov(lat.dim, 5).state()
    traj = evolve(g0, V, lat, t_final=0.3)
    if max(traj.purity) > 1e-10:
        return f"purity residual grew to {max(traj.purity):.3e}"
    drift = max(abs(x - traj.trace_omega[0]) for x in traj.trace_omega)
    if drift > 1e-9:
        return f"particle number drifted by {drift:.3e}"
    return None


def _check_subtle_identity(L_cut: int = 1) -> str | None:
    lat = LatticeSpec(dimension=1, cutoff=L_cut, spin_count=2,
                      particle_counts=(1, 1))
    for seed in range(5):
        b = random_bogoliubov(lat.dim, seed)
        g = b.state()
        for p in lat.dual_momenta():
            res = subtle_identity_residual(b, g, lat, p)
            if res > 1e-10:
                return f"identity residual {res:.3e} at p={p}, seed={seed}"
    return None


def _check_operator_bounds(L: int = 6, samples: int = 50) -> str | None:
    rng = np.random.default_rng(99)
    dim = 1 << L
    for _ in range(samples):
        O = rng.standard_normal((L, L)) + 1j * rng.standard_normal((L, L))
        amp = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        psi = FockVector(amp / np.linalg.norm(amp), L)
        dG = second_quantize(O)
        lhs = np.linalg.norm(dG @ psi.amplitudes)
        op_norm = np.linalg.svd(O, compute_uv=False)[0]
        n_psi = np.sqrt(number_moment(psi, 2) - 2 * number_moment(psi, 1) + 1)
        if lhs > op_norm * n_psi + 1e-12:
            return "one-body operator norm bound violated"
        hs = np.linalg.norm(O)
        half = np.sqrt(number_moment(psi, 1) - 1)
        if lhs > hs * half + 1e-12:
            return "one-body Hilbert-Schmidt bound violated"
    return None


_SUITES = [
    ("car", _check_car),
    ("wick-vs-exact", _check_wick),
    ("purity-transport", _check_purity_transport),
    ("pairing-block-identity", _check_subtle_identity),
    ("operator-bounds", _check_operator_bounds),
]


def run_all() -> list[tuple[str, str]]:
    """Run every suite; return (name, message) pairs for the failures."""
    failures = []
    for name, func in _SUITES:
        try:
            msg = func()
        except Exception as exc:  # a crash is a failure, not an abort
            msg = f"crashed: {exc!r}"
        if msg is not None:
            failures.append((name, msg))
        else:
            print(f"ok   {name}")
    return failures
