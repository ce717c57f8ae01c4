"""Pure quasi-free fermionic states: (omega, alpha) pairs, Bogoliubov maps,
their canonical factorization, and Wick-rule correlation functions.

Conventions, fixed once for the whole package:
  * omega(x; y) = <a*_y a_x>  (operator kernel, Hermitian, 0 <= omega <= 1)
  * alpha(x; y) = <a_y a_x>   (bilinear pairing kernel, antisymmetric)
  * complex conjugation is entrywise in the flattened momentum-spin basis.
The generalized density matrix Gamma = [[omega, alpha], [-conj(alpha),
1 - conj(omega)]] is a Hermitian projector exactly when the state is pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import logm

__all__ = [
    "OperatorSymbol",
    "GeneralizedDensityMatrix",
    "BogoliubovMap",
    "OneBodyFactor",
    "PairFactor",
    "FillFactor",
    "purity_residual",
    "gamma_matrix",
    "bloch_messiah",
    "random_bogoliubov",
    "two_point",
    "wick_correlation",
    "kparticle_rdm",
]

CREATE = "create"
ANNIHILATE = "annihilate"

PURITY_TOL = 1e-9


@dataclass(frozen=True)
class OperatorSymbol:
    """One creation or annihilation operator, by flattened mode index."""

    flavor: str
    index: int

    def __post_init__(self):
        if self.flavor not in (CREATE, ANNIHILATE):
            raise ValueError(f"flavor must be {CREATE!r} or {ANNIHILATE!r}")

    @property
    def is_create(self) -> bool:
        return self.flavor == CREATE

    def adjoint(self) -> "OperatorSymbol":
        return OperatorSymbol(ANNIHILATE if self.is_create else CREATE, self.index)


@dataclass
class GeneralizedDensityMatrix:
    """(omega, alpha) pair over a common L-dimensional mode space."""

    omega: np.ndarray
    alpha: np.ndarray

    def __post_init__(self):
        self.omega = np.asarray(self.omega, dtype=complex)
        self.alpha = np.asarray(self.alpha, dtype=complex)
        if self.omega.shape != self.alpha.shape or self.omega.ndim != 2 \
                or self.omega.shape[0] != self.omega.shape[1]:
            raise ValueError("omega and alpha must be square matrices of equal size")

    @property
    def dim(self) -> int:
        return self.omega.shape[0]

    @property
    def particle_number(self) -> float:
        return float(np.trace(self.omega).real)

    def alpha_hs_norm(self) -> float:
        return float(np.linalg.norm(self.alpha))

    def copy(self) -> "GeneralizedDensityMatrix":
        return GeneralizedDensityMatrix(self.omega.copy(), self.alpha.copy())


def gamma_matrix(g: GeneralizedDensityMatrix) -> np.ndarray:
    """Doubled-space block matrix [[omega, alpha], [-conj(alpha), 1-conj(omega)]]."""
    L = g.dim
    top = np.hstack([g.omega, g.alpha])
    bot = np.hstack([-g.alpha.conj(), np.eye(L) - g.omega.conj()])
    return np.vstack([top, bot])


def from_gamma(gamma: np.ndarray) -> GeneralizedDensityMatrix:
    L = gamma.shape[0] // 2
    return GeneralizedDensityMatrix(gamma[:L, :L].copy(), gamma[:L, L:].copy())


def purity_residual(g: GeneralizedDensityMatrix) -> float:
    """Frobenius norm of Gamma^2 - Gamma; zero iff the state is pure quasi-free."""
    gam = gamma_matrix(g)
    return float(np.linalg.norm(gam @ gam - gam))


# ---------------------------------------------------------------------------
# Elementary Bogoliubov factors.
#
# Each factor F carries the conjugation matrices (U, V) defined by
#   F^dagger a_i F = sum_j U[i, j] a_j + V[i, j] a*_j ,
# from which u = U^dagger and v = V^dagger in the (omega, alpha) = (v*v, v*u-bar)
# parametrization.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OneBodyFactor:
    """Number-conserving rotation exp(dGamma(log W)) for a unitary W."""

    matrix: np.ndarray

    def conjugation(self, L: int) -> tuple[np.ndarray, np.ndarray]:
        W = np.asarray(self.matrix, dtype=complex)
        if W.shape != (L, L):
            raise ValueError("one-body factor has wrong dimension")
        return W, np.zeros((L, L), dtype=complex)

    def generator(self) -> np.ndarray:
        K = logm(np.asarray(self.matrix, dtype=complex))
        return (K - K.conj().T) / 2.0  # project out round-off Hermitian part


@dataclass(frozen=True)
class PairFactor:
    """Two-mode pair rotation exp(theta (a*_i a*_j - a_j a_i))."""

    theta: float
    modes: tuple[int, int]

    def conjugation(self, L: int) -> tuple[np.ndarray, np.ndarray]:
        i, j = self.modes
        if i == j:
            raise ValueError("pair factor needs two distinct modes")
        c, s = np.cos(self.theta), np.sin(self.theta)
        U = np.eye(L, dtype=complex)
        V = np.zeros((L, L), dtype=complex)
        U[i, i] = c
        U[j, j] = c
        V[i, j] = s
        V[j, i] = -s
        return U, V


@dataclass(frozen=True)
class FillFactor:
    """Particle-hole flip a_i <-> a*_i (the unitary a_i + a*_i)."""

    mode: int

    def conjugation(self, L: int) -> tuple[np.ndarray, np.ndarray]:
        U = -np.eye(L, dtype=complex)
        V = np.zeros((L, L), dtype=complex)
        U[self.mode, self.mode] = 0.0
        V[self.mode, self.mode] = 1.0
        return U, V


def _compose_conjugations(factors, L: int) -> tuple[np.ndarray, np.ndarray]:
    """(U, V) of the product R = F_last ... F_first, factors in application order."""
    U = np.eye(L, dtype=complex)
    V = np.zeros((L, L), dtype=complex)
    for f in factors:
        Uf, Vf = f.conjugation(L)
        U, V = Uf @ U + Vf @ V.conj(), Uf @ V + Vf @ U.conj()
    return U, V


@dataclass
class BogoliubovMap:
    """Block pair (u, v) with u*u + v*v = 1 etc., plus an elementary factoring.

    factors are listed in the order they act on the vacuum (first applied
    first); composing them reproduces (u, v).
    """

    u: np.ndarray
    v: np.ndarray
    factors: list = field(default_factory=list)

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=complex)
        self.v = np.asarray(self.v, dtype=complex)

    @property
    def dim(self) -> int:
        return self.u.shape[0]

    @classmethod
    def from_factors(cls, factors, L: int) -> "BogoliubovMap":
        U, V = _compose_conjugations(factors, L)
        return cls(u=U.conj().T, v=V.conj().T, factors=list(factors))

    @classmethod
    def identity(cls, L: int) -> "BogoliubovMap":
        return cls(u=np.eye(L, dtype=complex), v=np.zeros((L, L), dtype=complex),
                   factors=[])

    def relation_residual(self) -> float:
        """Max Frobenius residual of the four Bogoliubov block relations."""
        u, v = self.u, self.v
        L = self.dim
        eye = np.eye(L)
        rs = [
            u.conj().T @ u + v.conj().T @ v - eye,
            u.conj().T @ v.conj() + v.conj().T @ u.conj(),
            u @ u.conj().T + v.conj() @ v.T - eye,
            u @ v.conj().T + v.conj() @ u.T,
        ]
        return float(max(np.linalg.norm(r) for r in rs))

    def state(self) -> GeneralizedDensityMatrix:
        """(omega, alpha) = (v*v, v* u-bar) of the transformed vacuum."""
        v, u = self.v, self.u
        return GeneralizedDensityMatrix(v.conj().T @ v, v.conj().T @ u.conj())

    def factored_residual(self) -> float:
        """How far the composed factors are from the stored (u, v)."""
        comp = BogoliubovMap.from_factors(self.factors, self.dim)
        return float(max(np.linalg.norm(comp.u - self.u),
                         np.linalg.norm(comp.v - self.v)))


def random_bogoliubov(L: int, seed) -> BogoliubovMap:
    """Haar-like random Bogoliubov map from random elementary factors."""
    if L < 1:
        raise ValueError("L must be >= 1")
    rng = np.random.default_rng(seed)
    factors = []
    perm = rng.permutation(L)
    for m in range(L // 2):
        theta = rng.uniform(0.0, np.pi / 2)
        factors.append(PairFactor(theta, (int(perm[2 * m]), int(perm[2 * m + 1]))))
    z = rng.standard_normal((L, L)) + 1j * rng.standard_normal((L, L))
    q, r = np.linalg.qr(z)
    q = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
    factors.append(OneBodyFactor(q))
    return BogoliubovMap.from_factors(factors, L)


# ---------------------------------------------------------------------------
# Canonical factorization (Bloch-Messiah) of a pure (omega, alpha).
# ---------------------------------------------------------------------------

_OCC_TOL = 1e-8
_GROUP_TOL = 1e-7


def bloch_messiah(g: GeneralizedDensityMatrix,
                  tol: float = PURITY_TOL) -> BogoliubovMap:
    """Factor a pure state into pair rotations and a one-body rotation.

    Returns a BogoliubovMap whose composed factors reproduce the input state:
    Gamma(u, v) = Gamma(g) to tolerance. The (u, v) gauge is fixed by the
    canonical form (occupations sorted descending, degenerate modes paired
    following the eigensolver order).
    """
    res = purity_residual(g)
    if res > tol:
        raise ValueError(f"state is not pure: purity residual {res:.3e} > {tol:.1e}")
    L = g.dim
    lam, phi = np.linalg.eigh(g.omega)
    order = np.argsort(lam)[::-1]
    lam, phi = lam[order].clip(0.0, 1.0), phi[:, order]
    A = phi.conj().T @ g.alpha @ phi.conj()  # pairing form in the omega eigenbasis

    filled = [m for m in range(L) if lam[m] >= 1.0 - _OCC_TOL]
    empty = [m for m in range(L) if lam[m] <= _OCC_TOL]
    middle = [m for m in range(L) if m not in filled and m not in empty]

    canonical: list[np.ndarray] = []  # canonical vectors, physical-space columns
    factors: list = []

    # Fully occupied modes: pairwise pi/2 rotations, odd leftover via a fill.
    for idx in range(0, len(filled) - 1, 2):
        i, j = len(canonical), len(canonical) + 1
        canonical.append(phi[:, filled[idx]])
        canonical.append(phi[:, filled[idx + 1]])
        factors.append(PairFactor(np.pi / 2, (i, j)))
    if len(filled) % 2:
        canonical.append(phi[:, filled[-1]])
        factors.append(FillFactor(len(canonical) - 1))

    # Partially occupied modes, grouped by (degenerate) occupation.
    start = 0
    while start < len(middle):
        stop = start + 1
        while stop < len(middle) and \
                abs(lam[middle[stop]] - lam[middle[start]]) < _GROUP_TOL:
            stop += 1
        group = middle[start:stop]
        start = stop
        lam_g = float(np.mean(lam[group]))
        s = np.sqrt(lam_g * (1.0 - lam_g))
        B = A[np.ix_(group, group)]
        if len(group) % 2:
            raise ValueError("odd degenerate block: state violates pairing purity")
        theta = np.arctan2(np.sqrt(lam_g), np.sqrt(1.0 - lam_g))
        basis = np.eye(len(group), dtype=complex)  # ONB of what is left to pair
        while basis.shape[1] > 0:
            x = basis[:, 0]
            y = B.T @ x.conj() / s
            # numerical hygiene: keep y inside the remaining subspace
            y = basis @ (basis.conj().T @ y)
            y = y / np.linalg.norm(y)
            amp = x @ B @ y.conj()
            if abs(amp - s) > 1e3 * max(tol, 1e-12):
                raise ValueError(
                    f"pairing block is not canonical (amplitude {amp:.3e}, "
                    f"expected {s:.3e}); state purity too poor to factor")
            i, j = len(canonical), len(canonical) + 1
            canonical.append(phi[:, group] @ x)
            canonical.append(phi[:, group] @ y)
            factors.append(PairFactor(theta, (i, j)))
            keep = basis - np.outer(x, x.conj() @ basis) - np.outer(y, y.conj() @ basis)
            q, r = np.linalg.qr(keep)
            nz = np.abs(np.diagonal(r)) > 1e-10
            basis = q[:, nz]

    for m in empty:
        canonical.append(phi[:, m])

    G = np.column_stack(canonical)
    factors.append(OneBodyFactor(G))
    return BogoliubovMap.from_factors(factors, L)


# ---------------------------------------------------------------------------
# Wick rule.
# ---------------------------------------------------------------------------


def two_point(g: GeneralizedDensityMatrix, a: OperatorSymbol,
              b: OperatorSymbol) -> complex:
    """<a b> on the quasi-free state, symbols in operator order (b rightmost)."""
    L = g.dim
    if not (0 <= a.index < L and 0 <= b.index < L):
        raise IndexError("operator index out of range")
    if a.is_create and not b.is_create:       # <a*_y a_x>
        return complex(g.omega[b.index, a.index])
    if not a.is_create and not b.is_create:   # <a_y a_x>
        return complex(g.alpha[b.index, a.index])
    if not a.is_create and b.is_create:       # <a_x a*_y>
        delta = 1.0 if a.index == b.index else 0.0
        return complex(delta - g.omega[a.index, b.index])
    # <a*_x a*_y> = conj(<a_y a_x>) = conj(alpha(x; y))
    return complex(np.conj(g.alpha[a.index, b.index]))


def wick_correlation(g: GeneralizedDensityMatrix, ops) -> complex:
    """Expectation of a product of OperatorSymbols via the Wick rule.

    Sum over the (2j-1)!! pairings, each contributing sgn(pi) times a product
    of two_point contractions; evaluated by contracting the leading symbol
    with each later one, the crossing count giving the sign.
    """
    ops = list(ops)
    if len(ops) % 2:
        raise ValueError("correlation needs an even number of operators")
    table = {}

    def _eval(symbols) -> complex:
        if not symbols:
            return 1.0 + 0.0j
        key = tuple(id(s) for s in symbols)
        if key in table:
            return table[key]
        first, rest = symbols[0], symbols[1:]
        total = 0.0 + 0.0j
        sign = 1.0
        for m, other in enumerate(rest):
            pair = two_point(g, first, other)
            if pair != 0.0:
                total += sign * pair * _eval(rest[:m] + rest[m + 1:])
            sign = -sign
        table[key] = total
        return total

    return complex(_eval(tuple(ops)))


def kparticle_rdm(g: GeneralizedDensityMatrix, k: int) -> np.ndarray:
    """k-particle reduced density tensor
    G[x_1..x_k, y_1..y_k] = <a*_{y_1}..a*_{y_k} a_{x_k}..a_{x_1}>.
    """
    if k < 1 or k > 3:
        raise ValueError("k must be between 1 and 3 (combinatorial guard)")
    L = g.dim
    if k == 1:
        return g.omega.copy()
    shape = (L,) * (2 * k)
    out = np.zeros(shape, dtype=complex)
    for idx in np.ndindex(shape):
        xs, ys = idx[:k], idx[k:]
        ops = [OperatorSymbol(CREATE, y) for y in ys]
        ops += [OperatorSymbol(ANNIHILATE, x) for x in reversed(xs)]
        out[idx] = wick_correlation(g, ops)
    return out
