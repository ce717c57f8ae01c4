"""Semiclassical-structure norms, growth envelopes, the pairing-block
operator identity, and mean-field-vs-exact error kernels.

The commutator norms follow the convention that the momentum gradient acts
as multiplication by i*eps*k in the momentum basis, and the position-phase
operators act as the truncated lattice shifts S_p; the supremum over
continuous transfer momenta is replaced by a max over the finite dual
lattice (recorded on every report).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .lattice import LatticeSpec, shift_operator
from .quasifree import (ANNIHILATE, CREATE, BogoliubovMap,
                        GeneralizedDensityMatrix, OperatorSymbol,
                        wick_correlation)
from .fock import FockVector, monomial_expectation

__all__ = [
    "SemiclassicalReport",
    "ErrorKernelReport",
    "semiclassical_report",
    "growth_envelope_fit",
    "subtle_identity_residual",
    "error_kernel",
]


@dataclass
class SemiclassicalReport:
    """Commutator norms of one (omega, alpha) snapshot.

    s1 = max over the dual lattice of (1+|p|)^{-1} ||[omega, S_p]||_HS;
    s2, s3 = HS norms of the commutators of omega and alpha with the
    diagonal multiplier i*eps*k (summed in quadrature over components).
    """

    t: float
    s1: float
    s2: float
    s3: float
    alpha_hs: float
    dual_window: int  # the sup over p is restricted to {-2K..2K}^d

    def as_row(self) -> dict:
        return {"t": self.t, "s1": self.s1, "s2": self.s2, "s3": self.s3,
                "alpha_hs": self.alpha_hs}


def _grad_commutator_hs(A: np.ndarray, lattice: LatticeSpec) -> float:
    """|| [A, i eps k] ||_HS with the commutator per momentum component."""
    ks, _ = lattice.mode_table()
    total = 0.0
    for axis in range(lattice.dimension):
        mult = 1j * lattice.epsilon * ks[:, axis].astype(float)
        comm = A * mult[np.newaxis, :] - mult[:, np.newaxis] * A
        total += float(np.linalg.norm(comm)) ** 2
    return np.sqrt(total)


def semiclassical_report(g: GeneralizedDensityMatrix, lattice: LatticeSpec,
                         t: float = 0.0) -> SemiclassicalReport:
    s1 = 0.0
    for p in lattice.dual_momenta():
        Sp = shift_operator(lattice, p)
        norm = float(np.linalg.norm(g.omega @ Sp - Sp @ g.omega))
        s1 = max(s1, norm / (1.0 + np.sqrt(sum(c * c for c in p))))
    return SemiclassicalReport(
        t=t,
        s1=s1,
        s2=_grad_commutator_hs(g.omega, lattice),
        s3=_grad_commutator_hs(g.alpha, lattice),
        alpha_hs=g.alpha_hs_norm(),
        dual_window=2 * lattice.cutoff,
    )


def growth_envelope_fit(reports: list[SemiclassicalReport],
                        alpha0_hs: float, n_particles: float,
                        dimension: int = 3) -> tuple[float, float, float]:
    """Fit (C, c) in the envelope C e^{c|t|} (N^{1/d} + |t| ||alpha_0||_HS)
    over the reported max(s1, s2, s3) values.

    Log-domain least squares with the additive shape fixed; C is then
    inflated so the fit is a true upper envelope. Returns (C, c,
    max_violation) where max_violation <= 0 by construction.
    """
    if len(reports) < 10:
        raise ValueError("need at least 10 report points for a fit")
    ts = np.array([r.t for r in reports])
    vals = np.array([max(r.s1, r.s2, r.s3) for r in reports])
    if np.all(vals == 0.0):
        raise ValueError("degenerate trajectory: all commutator norms vanish")
    shape = n_particles ** (1.0 / dimension) + np.abs(ts) * alpha0_hs
    y = np.log(np.maximum(vals, 1e-300) / shape)
    coef = np.polyfit(np.abs(ts), y, 1)
    c = max(float(coef[0]), 0.0)
    log_c_fit = np.max(y - c * np.abs(ts))  # lift to an upper envelope
    C = float(np.exp(log_c_fit))
    envelope = C * np.exp(c * np.abs(ts)) * shape
    violation = float(np.max(vals - envelope))
    return C, c, violation


def subtle_identity_residual(b: BogoliubovMap, g: GeneralizedDensityMatrix,
                             lattice: LatticeSpec, p) -> float:
    """HS residual of v S_p u* = v [omega, S_p] u* + u-bar alpha* S_p u*
    - v S_p alpha v^T, restricted to the columns the truncated shift keeps.
    """
    if g.dim != b.dim or b.dim != lattice.dim:
        raise ValueError("inconsistent (map, state, lattice) dimensions")
    state = b.state()
    if np.abs(state.omega - g.omega).max() > 1e-8 or \
            np.abs(state.alpha - g.alpha).max() > 1e-8:
        raise ValueError("state does not match the Bogoliubov map")
    u, v = b.u, b.v
    om, al = g.omega, g.alpha
    S = shift_operator(lattice, p)
    ustar = u.conj().T
    lhs = v @ S @ ustar
    rhs = v @ (om @ S - S @ om) @ ustar \
        + u.conj() @ al.conj().T @ S @ ustar \
        - v @ S @ al @ v.T
    keep = np.abs(S).sum(axis=0) > 0  # columns not annihilated by truncation
    return float(np.linalg.norm((lhs - rhs)[:, keep]))


@dataclass
class ErrorKernelReport:
    """Difference tensor between exact and Wick 2j-point functions."""

    order: int  # 2j
    signature: tuple  # one flavor per slot, operator order left to right
    err_hs: float
    wick_hs: float
    t: float = 0.0

    @property
    def ratio(self) -> float:
        return self.err_hs / self.wick_hs if self.wick_hs > 0 else np.nan


def error_kernel(psi: FockVector, g: GeneralizedDensityMatrix,
                 signature, j: int | None = None,
                 t: float = 0.0) -> ErrorKernelReport:
    """Tabulate <psi, a^#...a^# psi> - Wick(g) over all mode indices.

    signature is a sequence of 'create'/'annihilate' flavors of even length
    2j <= 6; the full 2j-index tensor is scanned, so the cost is L^{2j}.
    """
    signature = tuple(signature)
    if j is None:
        j = len(signature) // 2
    if len(signature) != 2 * j or j < 1 or j > 3:
        raise ValueError("signature must have length 2j with 1 <= j <= 3")
    for f in signature:
        if f not in (CREATE, ANNIHILATE):
            raise ValueError(f"bad flavor {f!r}")
    L = g.dim
    err_sq = 0.0
    wick_sq = 0.0
    for idx in itertools.product(range(L), repeat=2 * j):
        ops = [OperatorSymbol(f, i) for f, i in zip(signature, idx)]
        w = wick_correlation(g, ops)
        e = monomial_expectation(psi, ops)
        err_sq += abs(e - w) ** 2
        wick_sq += abs(w) ** 2
    return ErrorKernelReport(order=2 * j, signature=signature,
                             err_hs=float(np.sqrt(err_sq)),
                             wick_hs=float(np.sqrt(wick_sq)), t=t)
