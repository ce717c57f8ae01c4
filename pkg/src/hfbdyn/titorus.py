"""Translation-invariant quasi-free states in momentum space: the free Fermi
gas, interpolated paired states, the momentum-space energy functional, and
random scans around the free Fermi gas minimum.

A TI state is stored as a Fourier symbol: occupations omega_hat(k, sigma)
plus a pairing profile alpha_hat(k) coupling (k, up) with (-k, down). The
flat matrices are assembled on demand and always agree with the solver-side
energy to round-off.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import LatticeSpec, PotentialSpec
from .quasifree import GeneralizedDensityMatrix, purity_residual

__all__ = [
    "TISymbol",
    "ChemicalPotential",
    "ffg_symbol",
    "admissible_shell_counts",
    "lambda_state",
    "shell_profile",
    "hfb_energy_ti",
    "random_ti_state",
    "ground_state_scan",
    "pairing_bound_check",
]

SPIN_UP, SPIN_DOWN = 0, 1


@dataclass(frozen=True)
class ChemicalPotential:
    """Fermi level with the half-gap convention: k_F^2 sits 1/2 above the
    highest filled |k|^2 (so the distance to the filled spectrum is 1/2)."""

    mu: tuple  # per spin, in units of eps^2 |k|^2
    fermi_momentum_sq: tuple  # per spin, lattice units


@dataclass
class TISymbol:
    """Momentum-diagonal occupations and the (k,up)-(-k,down) pairing profile.

    omega_hat has shape (n_momenta, spin_count), alpha_hat shape (n_momenta,),
    both aligned with lattice.momenta() ordering. alpha_hat[i] is the matrix
    entry alpha[(k_i, up); (-k_i, down)]; the (down, up) block follows from
    antisymmetry.
    """

    lattice: LatticeSpec
    omega_hat: np.ndarray
    alpha_hat: np.ndarray

    def __post_init__(self):
        n_mom = self.lattice.modes_per_axis ** self.lattice.dimension
        self.omega_hat = np.asarray(self.omega_hat, dtype=float)
        self.alpha_hat = np.asarray(self.alpha_hat, dtype=complex)
        if self.omega_hat.shape != (n_mom, self.lattice.spin_count):
            raise ValueError("omega_hat shape mismatch")
        if self.alpha_hat.shape != (n_mom,):
            raise ValueError("alpha_hat shape mismatch")
        if self.omega_hat.min() < -1e-12 or self.omega_hat.max() > 1 + 1e-12:
            raise ValueError("occupations must lie in [0, 1]")

    def spin_counts(self) -> np.ndarray:
        return self.omega_hat.sum(axis=0)

    def assemble(self) -> GeneralizedDensityMatrix:
        lat = self.lattice
        L = lat.dim
        om = np.zeros((L, L), dtype=complex)
        al = np.zeros((L, L), dtype=complex)
        moms = lat.momenta()
        for i, k in enumerate(moms):
            for s in range(lat.spin_count):
                f = lat.flat_index(k, s)
                om[f, f] = self.omega_hat[i, s]
            if lat.spin_count == 2 and self.alpha_hat[i] != 0.0:
                a = lat.flat_index(k, SPIN_UP)
                b = lat.flat_index(tuple(-c for c in k), SPIN_DOWN)
                al[a, b] = self.alpha_hat[i]
                al[b, a] = -self.alpha_hat[i]
        return GeneralizedDensityMatrix(om, al)


def _shell_energies(lattice: LatticeSpec) -> np.ndarray:
    ks = lattice.momenta()
    return np.sum(ks.astype(float) ** 2, axis=1)


def admissible_shell_counts(lattice: LatticeSpec) -> list[int]:
    """Particle counts per spin for which the Fermi ball closes exactly."""
    e = np.sort(_shell_energies(lattice))
    counts = []
    for n in range(1, len(e) + 1):
        if n == len(e) or e[n] > e[n - 1]:
            counts.append(n)
    return counts


def ffg_symbol(lattice: LatticeSpec, n_sigma=None) -> tuple[TISymbol, ChemicalPotential]:
    """Free Fermi gas: omega_hat = indicator(|k|^2 <= k_F^2), no pairing.

    Each per-spin count must close a Fermi shell; otherwise the occupation
    of the boundary shell would be ambiguous and the state not unique.
    """
    if n_sigma is None:
        n_sigma = lattice.particle_counts
    n_sigma = tuple(int(n) for n in np.atleast_1d(n_sigma))
    if len(n_sigma) != lattice.spin_count:
        raise ValueError("need one particle count per spin")
    energies = _shell_energies(lattice)
    order = np.sort(energies)
    admissible = admissible_shell_counts(lattice)
    omega_hat = np.zeros((len(energies), lattice.spin_count))
    mu, kf2 = [], []
    for s, n in enumerate(n_sigma):
        if n == 0:
            mu.append(-lattice.epsilon ** 2 / 2)
            kf2.append(-0.5)
            continue
        if n not in admissible:
            raise ValueError(
                f"open shell: {n} particles per spin does not fill a Fermi "
                f"ball; admissible counts here: {admissible}")
        level = order[n - 1] + 0.5
        omega_hat[:, s] = (energies <= level).astype(float)
        mu.append(lattice.epsilon ** 2 * level)
        kf2.append(level)
    sym = TISymbol(lattice, omega_hat, np.zeros(len(energies), dtype=complex))
    return sym, ChemicalPotential(mu=tuple(mu), fermi_momentum_sq=tuple(kf2))


def _momentum_index(lattice: LatticeSpec) -> dict:
    return {tuple(k): i for i, k in enumerate(lattice.momenta())}


def lambda_state(lattice: LatticeSpec, profile) \
        -> tuple[TISymbol, GeneralizedDensityMatrix]:
    """Spin-balanced paired state from an even occupation profile.

    omega_hat(k, sigma) = lambda(k) for both spins; the pairing profile is
    alpha_hat(k) = sqrt(lambda(k)(1 - lambda(k))), coupling (k, up) with
    (-k, down). Requires lambda even, values in [0,1], and sum = N/2; the
    assembled state is pure by construction (each momentum pair is a
    two-mode rotation of the vacuum or a filled pair).
    """
    if lattice.spin_count != 2:
        raise ValueError("lambda states need two spin species")
    moms = lattice.momenta()
    idx = _momentum_index(lattice)
    lam = np.array([float(profile[tuple(k)]) if isinstance(profile, dict)
                    else float(profile[i]) for i, k in enumerate(moms)])
    if lam.min() < -1e-12 or lam.max() > 1 + 1e-12:
        raise ValueError("profile values must lie in [0, 1]")
    lam = lam.clip(0.0, 1.0)
    for i, k in enumerate(moms):
        j = idx[tuple(-c for c in k)]
        if abs(lam[i] - lam[j]) > 1e-12:
            raise ValueError(f"profile is not even at k={tuple(k)}")
    n_half = lattice.total_particles / 2.0
    if abs(lam.sum() - n_half) > 1e-9:
        raise ValueError(f"profile sums to {lam.sum()}, expected N/2 = {n_half}")
    omega_hat = np.stack([lam, lam], axis=1)
    alpha_hat = np.sqrt(lam * (1.0 - lam)).astype(complex)
    sym = TISymbol(lattice, omega_hat, alpha_hat)
    g = sym.assemble()
    res = purity_residual(g)
    if res > 1e-12:
        raise AssertionError(f"assembled lambda state impure: {res:.3e}")
    return sym, g


def shell_profile(lattice: LatticeSpec, n_sigma: int,
                  width: float = 0.5) -> np.ndarray:
    """Even occupation profile interpolating across the Fermi surface.

    A Fermi function 1/(1 + exp((|k| - r_F)/width)) of the momentum radius,
    with r_F solved by bisection so the profile sums exactly to n_sigma.
    The interpolation is confined to a shell of O(width) thickness in |k|
    around the Fermi surface, so the induced pairing sqrt(lam(1-lam)) lives
    on O(N^{(d-1)/d}) modes. Works for open shells too (degenerate boundary
    modes share occupation evenly).
    """
    radii = np.sqrt(_shell_energies(lattice))
    n_mom = len(radii)
    if not 0 < n_sigma < n_mom:
        raise ValueError(f"need 0 < n_sigma < {n_mom}, got {n_sigma}")
    if width <= 0:
        raise ValueError("width must be positive")

    def total(mu):
        return 1.0 / (1.0 + np.exp((radii - mu) / width))

    lo = radii.min() - 60.0 * width
    hi = radii.max() + 60.0 * width
    for _ in range(200):
        mu = 0.5 * (lo + hi)
        if total(mu).sum() < n_sigma:
            lo = mu
        else:
            hi = mu
    lam = total(0.5 * (lo + hi))
    lam *= n_sigma / lam.sum()  # absorb the last bisection epsilon
    if lam.max() > 1.0:
        raise ValueError("profile saturated; increase the cutoff or width")
    return lam


def hfb_energy_ti(sym: TISymbol, V: PotentialSpec,
                  n_ref: float | None = None) -> float:
    """Momentum-space energy: kinetic sum + N V(0)/2 - exchange + pairing.

    exchange = (1/2N) sum_sigma sum_{k,k'} V(k-k') w(k,s) w(k',s)
    pairing  = (1/N)  sum_{k,k'}  V(k-k') conj(a(k)) a(k')
    with both convolutions restricted to the momentum window, which matches
    the truncated-shift sandwich operators of the solver exactly.
    """
    lat = sym.lattice
    moms = lat.momenta()
    energies = _shell_energies(lat)
    N = float(n_ref) if n_ref is not None else float(sym.omega_hat.sum())
    kinetic = float(lat.epsilon ** 2 * (energies[:, None] * sym.omega_hat).sum())
    direct = 0.5 * N * V.coefficient((0,) * lat.dimension)
    n_mom = len(moms)
    vmat = np.zeros((n_mom, n_mom))
    for i in range(n_mom):
        for j in range(n_mom):
            vmat[i, j] = V.coefficient(tuple(moms[i] - moms[j]))
    exchange = 0.0
    for s in range(lat.spin_count):
        w = sym.omega_hat[:, s]
        exchange += float(w @ vmat @ w)
    exchange /= 2.0 * N
    pairing = float((sym.alpha_hat.conj() @ vmat @ sym.alpha_hat).real) / N
    return kinetic + direct - exchange + pairing


def random_ti_state(lattice: LatticeSpec, rng) -> TISymbol:
    """One random pure TI symbol with the per-spin particle counts of the
    lattice: a phase-dressed even paired profile carrying min(N_up, N_down)
    pairs, plus |N_up - N_down| fully filled majority-spin modes."""
    if lattice.spin_count != 2:
        raise ValueError("sampler needs two spin species")
    n_up, n_down = lattice.particle_counts
    n_pair, extra = min(n_up, n_down), abs(n_up - n_down)
    major = SPIN_UP if n_up >= n_down else SPIN_DOWN
    moms = lattice.momenta()
    idx = _momentum_index(lattice)
    n_mom = len(moms)

    if rng.random() < 0.25:
        # Slater direction: random integer occupations, no pairing.
        omega_hat = np.zeros((n_mom, 2))
        for s, n in enumerate(lattice.particle_counts):
            omega_hat[rng.choice(n_mom, size=n, replace=False), s] = 1.0
        return TISymbol(lattice, omega_hat, np.zeros(n_mom, dtype=complex))

    filled = rng.choice(n_mom, size=extra, replace=False) if extra else np.array([], int)
    blocked = np.zeros(n_mom, dtype=bool)
    for f in filled:
        blocked[f] = True
        blocked[idx[tuple(-c for c in moms[f])]] = True
    raw = rng.gamma(1.0, size=n_mom)
    for i, k in enumerate(moms):  # symmetrize
        j = idx[tuple(-c for c in k)]
        if j > i:
            raw[i] = raw[j] = 0.5 * (raw[i] + raw[j])
    raw[blocked] = 0.0
    lam = raw * (n_pair / raw.sum()) if n_pair else np.zeros(n_mom)
    for _ in range(n_mom):  # redistribute mass that would exceed full filling
        over = lam > 1.0
        if not over.any():
            break
        excess = float((lam[over] - 1.0).sum())
        lam[over] = 1.0
        room = (~over) & (~blocked) & (lam > 0)
        lam[room] += excess * lam[room] / lam[room].sum()
    omega_hat = np.stack([lam, lam], axis=1)
    omega_hat[filled, major] = 1.0
    phases = np.exp(2j * np.pi * rng.random(n_mom))
    alpha_hat = phases * np.sqrt(lam * (1.0 - lam))
    return TISymbol(lattice, omega_hat, alpha_hat)


def ground_state_scan(lattice: LatticeSpec, V: PotentialSpec, trials: int,
                      seed) -> dict:
    """Sample random TI pure states and compare their energies to the FFG.

    Returns min/mean gap statistics; gaps should all be >= 0 when the free
    Fermi gas is the translation-invariant ground state for this (N, V).
    """
    ffg, _ = ffg_symbol(lattice)
    n_ref = float(lattice.total_particles)
    e_ffg = hfb_energy_ti(ffg, V, n_ref=n_ref)
    rng = np.random.default_rng(seed)
    gaps = np.empty(trials)
    for t in range(trials):
        sym = random_ti_state(lattice, rng)
        gaps[t] = hfb_energy_ti(sym, V, n_ref=n_ref) - e_ffg
    return {
        "trials": trials,
        "ffg_energy": e_ffg,
        "min_gap": float(gaps.min()),
        "mean_gap": float(gaps.mean()),
        "max_gap": float(gaps.max()),
        "ffg_self_gap": hfb_energy_ti(ffg, V, n_ref=n_ref) - e_ffg,
    }


def pairing_bound_check(cutoffs_and_counts, V_builder,
                        width: float = 0.5) -> list[dict]:
    """Tabulate the pairing-norm and commutator ratios across an N grid.

    cutoffs_and_counts: iterable of (dimension, cutoff, n_sigma) with closed
    shells n_sigma per spin. For each N the lambda-state on the Fermi shell
    is built and the three scale-free ratios are reported:
      alpha_ratio = ||alpha||_HS^2 / N^{(d-1)/d}
      grad_ratio  = ||[eps grad, alpha]||_HS^2 / N^{(d-1)/d}
      s1_ratio    = max_p (1+|p|)^{-2} ||[omega, S_p]||_HS^2 / (N eps)
    """
    from .diagnostics import semiclassical_report

    rows = []
    for d, K, n_sigma in cutoffs_and_counts:
        lat = LatticeSpec(dimension=d, cutoff=K, spin_count=2,
                          particle_counts=(n_sigma, n_sigma))
        lam = shell_profile(lat, n_sigma, width=width)
        sym, g = lambda_state(lat, lam)
        N = lat.total_particles
        scale = N ** ((d - 1) / d)
        rep = semiclassical_report(g, lat)
        rows.append({
            "N": N,
            "dimension": d,
            "cutoff": K,
            "alpha_ratio": g.alpha_hs_norm() ** 2 / scale,
            "grad_ratio": rep.s3 ** 2 / scale,
            "s1_ratio": rep.s1 ** 2 / (N * lat.epsilon),
            "energy": hfb_energy_ti(sym, V_builder(lat), n_ref=float(N)),
        })
    return rows
