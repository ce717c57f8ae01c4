"""Exact Fock-space oracle: sparse Jordan-Wigner operators on 2^L dimensions.

Occupation bitstrings index the basis: bit b of the integer basis label is the
occupation of flattened mode b, and the Jordan-Wigner string counts occupied
modes of lower flat index, so operator signs agree with the lattice
flattening order used everywhere else.

Everything here is brute force on purpose; it exists to validate the
quasi-free machinery, not to scale. Dimensions above L = 16 are refused.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .lattice import LatticeSpec, PotentialSpec, kinetic_symbol, shift_operator
from .quasifree import (BogoliubovMap, FillFactor, OneBodyFactor, PairFactor,
                        GeneralizedDensityMatrix, OperatorSymbol)

__all__ = [
    "FockVector",
    "annihilator",
    "creator",
    "second_quantize",
    "build_hamiltonian",
    "evolve_exact",
    "rdm1",
    "pairing1",
    "reduced_state",
    "gaussian_prepare",
    "number_moment",
    "monomial_expectation",
]

L_MAX = 16
NORM_TOL = 1e-10


def _check_modes(L: int):
    if not 1 <= L <= L_MAX:
        raise ValueError(f"mode count {L} outside supported range 1..{L_MAX}")


@lru_cache(maxsize=4)
def _popcounts(L: int) -> np.ndarray:
    idx = np.arange(1 << L, dtype=np.uint32)
    counts = np.zeros(1 << L, dtype=np.int8)
    for b in range(L):
        counts += ((idx >> b) & 1).astype(np.int8)
    return counts


@lru_cache(maxsize=64)
def annihilator(L: int, mode: int) -> sp.csr_matrix:
    """Sparse a_mode with the Jordan-Wigner sign convention above."""
    _check_modes(L)
    if not 0 <= mode < L:
        raise IndexError(f"mode {mode} out of range for L={L}")
    idx = np.arange(1 << L, dtype=np.int64)
    occupied = ((idx >> mode) & 1).astype(bool)
    src = idx[occupied]
    dst = src ^ (1 << mode)
    below = _popcounts(L)[src & ((1 << mode) - 1)] if mode else np.zeros(len(src))
    sign = 1.0 - 2.0 * (np.asarray(below, dtype=np.int64) & 1)
    return sp.csr_matrix((sign.astype(complex), (dst, src)),
                         shape=(1 << L, 1 << L))


def creator(L: int, mode: int) -> sp.csr_matrix:
    return annihilator(L, mode).conj().T.tocsr()


@dataclass
class FockVector:
    """Normalized state vector on the 2^L dimensional Fock space."""

    amplitudes: np.ndarray
    modes: int

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).ravel()
        _check_modes(self.modes)
        if self.amplitudes.size != (1 << self.modes):
            raise ValueError("amplitude vector has wrong dimension")
        nrm = np.linalg.norm(self.amplitudes)
        if abs(nrm - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: |psi| = {nrm!r}")

    @classmethod
    def vacuum(cls, L: int) -> "FockVector":
        amp = np.zeros(1 << L, dtype=complex)
        amp[0] = 1.0
        return cls(amp, L)

    def expectation(self, op: sp.spmatrix) -> complex:
        return complex(np.vdot(self.amplitudes, op @ self.amplitudes))

    def overlap(self, other: "FockVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def second_quantize(O: np.ndarray) -> sp.csr_matrix:
    """dGamma(O) = sum_ij O[i, j] a*_i a_j as a sparse Fock operator."""
    O = np.asarray(O, dtype=complex)
    L = O.shape[0]
    _check_modes(L)
    out = sp.csr_matrix(((1 << L), (1 << L)), dtype=complex)
    rows, cols = np.nonzero(O)
    for i, j in zip(rows, cols):
        out = out + O[i, j] * (creator(L, int(i)) @ annihilator(L, int(j)))
    return out.tocsr()


def build_hamiltonian(lattice: LatticeSpec, potential: PotentialSpec) -> sp.csr_matrix:
    """Kinetic term dGamma(eps^2 |k|^2) plus the 1/(2N) density-density
    interaction, assembled per transfer momentum as
    (V(p)/2N) [dGamma(S_p) dGamma(S_-p) - dGamma(S_p S_-p)].
    """
    L = lattice.dim
    _check_modes(L)
    H = second_quantize(kinetic_symbol(lattice))
    N = potential.particle_number
    for p in potential.nonzero_momenta():
        vp = potential.coefficient(p)
        Sp = shift_operator(lattice, p)
        Dp = second_quantize(Sp)
        H = H + (vp / (2.0 * N)) * (Dp @ Dp.conj().T.tocsr()
                                    - second_quantize(Sp @ Sp.conj().T))
    herm = (H - H.conj().T).tocoo()
    if herm.nnz and np.abs(herm.data).max() > 1e-12:
        raise AssertionError("assembled Hamiltonian is not Hermitian")
    return H.tocsr()


def evolve_exact(psi: FockVector, H: sp.spmatrix, t: float,
                 epsilon: float) -> FockVector:
    """exp(-i t H / epsilon) psi via Krylov expm_multiply."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    amp = expm_multiply((-1j * t / epsilon) * H.tocsc(), psi.amplitudes)
    amp = amp / np.linalg.norm(amp)  # Krylov round-off only; drift is ~1e-13
    return FockVector(amp, psi.modes)


def _mode_images(psi: FockVector):
    L = psi.modes
    ann = np.stack([annihilator(L, x) @ psi.amplitudes for x in range(L)])
    cre = np.stack([creator(L, x) @ psi.amplitudes for x in range(L)])
    return ann, cre


def rdm1(psi: FockVector) -> np.ndarray:
    """One-particle reduced density omega(x; y) = <a*_y a_x>."""
    ann, _ = _mode_images(psi)
    return ann @ ann.conj().T


def pairing1(psi: FockVector) -> np.ndarray:
    """Pairing kernel alpha(x; y) = <a_y a_x>."""
    ann, cre = _mode_images(psi)
    return ann @ cre.conj().T


def reduced_state(psi: FockVector) -> GeneralizedDensityMatrix:
    return GeneralizedDensityMatrix(rdm1(psi), pairing1(psi))


def monomial_expectation(psi: FockVector, ops) -> complex:
    """Exact expectation of a product of OperatorSymbols (rightmost first)."""
    L = psi.modes
    vec = psi.amplitudes
    for sym in reversed(list(ops)):
        mat = creator(L, sym.index) if sym.is_create else annihilator(L, sym.index)
        vec = mat @ vec
    return complex(np.vdot(psi.amplitudes, vec))


def number_moment(psi: FockVector, k: int) -> float:
    """<(N_hat + 1)^k>, exact (N_hat is diagonal in the occupation basis)."""
    weights = (_popcounts(psi.modes).astype(float) + 1.0) ** k
    return float(np.sum(np.abs(psi.amplitudes) ** 2 * weights))


def _apply_factor(factor, amp: np.ndarray, L: int) -> np.ndarray:
    if isinstance(factor, OneBodyFactor):
        return expm_multiply(second_quantize(factor.generator()).tocsc(), amp)
    if isinstance(factor, PairFactor):
        i, j = factor.modes
        raise_op = creator(L, i) @ annihilator(L, j).conj().T.tocsr()  # a*_i a*_j
        gen = factor.theta * (raise_op - raise_op.conj().T)
        return expm_multiply(gen.tocsc(), amp)
    if isinstance(factor, FillFactor):
        return (annihilator(L, factor.mode) + creator(L, factor.mode)) @ amp
    raise TypeError(f"unknown factor type {type(factor).__name__}")


def gaussian_prepare(bmap: BogoliubovMap, L: int | None = None) -> FockVector:
    """Apply the elementary factors of a Bogoliubov map to the vacuum.

    The resulting vector is the quasi-free state with omega = v*v and
    alpha = v* u-bar (up to a global phase).
    """
    L = bmap.dim if L is None else L
    _check_modes(L)
    amp = np.zeros(1 << L, dtype=complex)
    amp[0] = 1.0
    for factor in bmap.factors:
        amp = _apply_factor(factor, amp, L)
    amp = amp / np.linalg.norm(amp)
    return FockVector(amp, L)
