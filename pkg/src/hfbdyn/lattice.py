"""Discrete momentum torus: mode bookkeeping, kinetic symbols, shifts, potentials.

Single-particle modes live on {-K,...,K}^d x {0,...,S-1} (momentum x spin).
The flattened index runs row-major over (k_1,...,k_d, sigma), so spin is the
fastest index. Momentum transfers live on the doubled dual window
{-2K,...,2K}^d so every transfer between retained modes is representable.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LatticeSpec",
    "PotentialSpec",
    "ModeIndex",
    "kinetic_symbol",
    "shift_operator",
    "shift_fill_factor",
    "named_potential",
]


@dataclass(frozen=True)
class LatticeSpec:
    """Finite momentum window on the torus of side 2*pi, with spin.

    epsilon defaults to N**(-1/d), the d-dimensional analogue of the
    semiclassical coupling; pass epsilon explicitly to override.
    """

    dimension: int
    cutoff: int
    spin_count: int = 2
    particle_counts: tuple[int, ...] = (1, 1)
    epsilon: float | None = None

    def __post_init__(self):
        if self.dimension not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.dimension}")
        if self.cutoff < 0:
            raise ValueError("cutoff must be non-negative")
        if self.spin_count not in (1, 2):
            raise ValueError(f"spin_count must be 1 or 2, got {self.spin_count}")
        counts = tuple(int(n) for n in self.particle_counts)
        if len(counts) != self.spin_count:
            raise ValueError("particle_counts must have one entry per spin")
        object.__setattr__(self, "particle_counts", counts)
        if not 0 < self.total_particles <= self.dim:
            raise ValueError(
                f"need 0 < N <= L, got N={self.total_particles}, L={self.dim}"
            )
        eps = self.epsilon
        if eps is None:
            eps = self.total_particles ** (-1.0 / self.dimension)
        if eps < 0:
            raise ValueError("epsilon must be non-negative")
        object.__setattr__(self, "epsilon", float(eps))

    @property
    def modes_per_axis(self) -> int:
        return 2 * self.cutoff + 1

    @property
    def dim(self) -> int:
        """Total single-particle dimension L = (2K+1)^d * S."""
        return self.modes_per_axis ** self.dimension * self.spin_count

    @property
    def total_particles(self) -> int:
        return sum(self.particle_counts)

    def momenta(self) -> np.ndarray:
        """All momentum vectors in flattening order, shape ((2K+1)^d, d)."""
        rng = range(-self.cutoff, self.cutoff + 1)
        return np.array(list(itertools.product(rng, repeat=self.dimension)), dtype=int)

    def flat_index(self, k, sigma: int) -> int:
        k = tuple(int(c) for c in np.atleast_1d(k))
        if len(k) != self.dimension:
            raise ValueError(f"momentum must have {self.dimension} components")
        if any(abs(c) > self.cutoff for c in k):
            raise IndexError(f"momentum {k} outside window K={self.cutoff}")
        if not 0 <= sigma < self.spin_count:
            raise IndexError(f"spin {sigma} out of range")
        idx = 0
        for c in k:
            idx = idx * self.modes_per_axis + (c + self.cutoff)
        return idx * self.spin_count + sigma

    def mode(self, flat: int) -> "ModeIndex":
        if not 0 <= flat < self.dim:
            raise IndexError(f"flat index {flat} out of range")
        sigma = flat % self.spin_count
        rest = flat // self.spin_count
        comps = []
        for _ in range(self.dimension):
            comps.append(rest % self.modes_per_axis - self.cutoff)
            rest //= self.modes_per_axis
        return ModeIndex(momentum=tuple(reversed(comps)), spin=sigma, flat=flat)

    def mode_table(self) -> tuple[np.ndarray, np.ndarray]:
        """(momenta, spins) aligned with the flat index, shapes (L, d) and (L,)."""
        ks = np.repeat(self.momenta(), self.spin_count, axis=0)
        spins = np.tile(np.arange(self.spin_count), self.modes_per_axis ** self.dimension)
        return ks, spins

    def dual_momenta(self) -> list[tuple[int, ...]]:
        """Momentum transfers p in {-2K,...,2K}^d."""
        rng = range(-2 * self.cutoff, 2 * self.cutoff + 1)
        return [tuple(p) for p in itertools.product(rng, repeat=self.dimension)]


@dataclass(frozen=True)
class ModeIndex:
    momentum: tuple[int, ...]
    spin: int
    flat: int


@dataclass(frozen=True)
class PotentialSpec:
    """Real, even two-body interaction given by Fourier coefficients on the
    dual window, with implicit 1/N coupling."""

    fourier_coefficients: dict = field(default_factory=dict)
    particle_number: int = 1

    def __post_init__(self):
        table = {tuple(int(c) for c in p): float(v)
                 for p, v in self.fourier_coefficients.items()}
        for p, v in table.items():
            mp = tuple(-c for c in p)
            if mp not in table or abs(table[mp] - v) > 0.0:
                raise ValueError(f"potential table not even at p={p}")
        object.__setattr__(self, "fourier_coefficients", table)

    def coefficient(self, p) -> float:
        return self.fourier_coefficients.get(tuple(int(c) for c in np.atleast_1d(p)), 0.0)

    def weighted_sum(self) -> float:
        """Diagnostic sum_p |V(p)| (1 + |p|^2), finite on the window."""
        return sum(
            abs(v) * (1.0 + sum(c * c for c in p))
            for p, v in self.fourier_coefficients.items()
        )

    def nonzero_momenta(self) -> list[tuple[int, ...]]:
        return [p for p, v in self.fourier_coefficients.items() if v != 0.0]


def kinetic_symbol(lattice: LatticeSpec) -> np.ndarray:
    """Diagonal matrix of eps^2 |k|^2 over the flattened mode index."""
    ks, _ = lattice.mode_table()
    diag = lattice.epsilon ** 2 * np.sum(ks.astype(float) ** 2, axis=1)
    return np.diag(diag).astype(complex)


def shift_operator(lattice: LatticeSpec, p) -> np.ndarray:
    """Truncated momentum translation S_p: (k, sigma) -> (k+p, sigma).

    Columns whose shifted momentum leaves the window are zero. S_0 is the
    identity and S_p^dagger = S_{-p} exactly on the finite window.
    """
    p = tuple(int(c) for c in np.atleast_1d(p))
    if len(p) != lattice.dimension:
        raise ValueError(f"shift must have {lattice.dimension} components")
    L = lattice.dim
    out = np.zeros((L, L), dtype=complex)
    ks, spins = lattice.mode_table()
    for col in range(L):
        kp = tuple(ks[col] + np.array(p, dtype=int))
        if all(abs(c) <= lattice.cutoff for c in kp):
            out[lattice.flat_index(kp, spins[col]), col] = 1.0
    return out


def shift_fill_factor(lattice: LatticeSpec, p) -> float:
    """Fraction of modes retained by the truncated shift S_p (1.0 = no loss)."""
    s = shift_operator(lattice, p)
    return float(np.count_nonzero(np.abs(s).sum(axis=0) > 0)) / lattice.dim


def named_potential(kind: str, params: dict, lattice: LatticeSpec) -> PotentialSpec:
    """Build a PotentialSpec on the dual window.

    kinds:
      gaussian            V(p) = v0 * exp(-|p|^2 / sigma^2)
      delta-like          V(p) = v0 for every p (point interaction)
      attractive-gaussian gaussian with v0 < 0 enforced
    """
    params = dict(params)
    v0 = float(params.get("v0", 1.0))
    table: dict[tuple[int, ...], float] = {}
    if kind in ("gaussian", "attractive-gaussian"):
        width = float(params.get("sigma", 1.0))
        if width <= 0:
            raise ValueError("gaussian width sigma must be positive")
        if kind == "attractive-gaussian" and v0 >= 0:
            raise ValueError("attractive-gaussian requires v0 < 0")
        for p in lattice.dual_momenta():
            table[p] = v0 * math.exp(-sum(c * c for c in p) / width ** 2)
    elif kind == "delta-like":
        for p in lattice.dual_momenta():
            table[p] = v0
    else:
        raise ValueError(f"unknown potential kind {kind!r}")
    return PotentialSpec(fourier_coefficients=table,
                         particle_number=lattice.total_particles)
