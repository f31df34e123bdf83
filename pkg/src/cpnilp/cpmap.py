"""Completely positive maps in Kraus form, X -> sum_i L_i^* X L_i.

Conventions
-----------
Vectorization is column stacking: ``vec(X)[j*n + i] = X[i, j]``. Under it
``vec(A X B) = (B^T ⊗ A) vec(X)``, so a single Kraus term contributes
``kron(L.T, L^*)`` to the superoperator.

The Choi matrix is ``C = sum_{ij} E_ij ⊗ α(E_ij)``. For one Kraus operator L it
equals ``ψψ^*`` with ``ψ = vec(L^*)``; :func:`from_choi` inverts this.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import DimensionMismatch, InvalidArgument, NotPSD
from .numerics import (
    DEFAULT_TOL,
    Subspace,
    Tolerance,
    certified_split,
    common_kernel,
    kernel,
    range_space,
    rank,
)


def vec(X: np.ndarray) -> np.ndarray:
    return np.asarray(X).reshape(-1, order="F")


def unvec(v: np.ndarray, n: int | None = None) -> np.ndarray:
    v = np.asarray(v)
    if n is None:
        n = int(round(np.sqrt(v.size)))
    return v.reshape((n, n), order="F")


def matrix_unit(n: int, i: int, j: int) -> np.ndarray:
    E = np.zeros((n, n), dtype=complex)
    E[i, j] = 1.0
    return E


@dataclass(frozen=True, eq=False)
class KrausMap:
    """CP map on B(C^dim) given by an ordered, nonempty Kraus list.

    The zero map is ``KrausMap([zeros((n, n))])``, never an empty list.
    """

    kraus: tuple
    dim: int = field(init=False)

    def __post_init__(self):
        ops = []
        for L in self.kraus:
            L = np.array(L, dtype=complex)
            if L.ndim != 2 or L.shape[0] != L.shape[1]:
                raise DimensionMismatch(f"Kraus operator has shape {L.shape}")
            if not np.all(np.isfinite(L)):
                raise InvalidArgument("Kraus operator has non-finite entries")
            L.setflags(write=False)
            ops.append(L)
        if not ops:
            raise InvalidArgument("a Kraus list needs at least one operator")
        n = ops[0].shape[0]
        if n < 1 or any(L.shape != (n, n) for L in ops):
            raise DimensionMismatch("Kraus operators must all be n x n with n >= 1")
        object.__setattr__(self, "kraus", tuple(ops))
        object.__setattr__(self, "dim", n)

    @property
    def d(self) -> int:
        return len(self.kraus)

    def __call__(self, X) -> np.ndarray:
        return apply(self, X)

    def scaled(self, factor: float) -> "KrausMap":
        """The map c·α, realised by scaling every Kraus operator by sqrt(c)."""
        r = np.sqrt(factor)
        return KrausMap([r * L for L in self.kraus])

    def __repr__(self):
        return f"KrausMap(dim={self.dim}, d={self.d})"


def zero_map(n: int) -> KrausMap:
    return KrausMap([np.zeros((n, n))])


def identity_channel(n: int) -> KrausMap:
    return KrausMap([np.eye(n)])


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    n: int
    matrix: np.ndarray


@dataclass(frozen=True, eq=False)
class Superoperator:
    """Linear map on B(C^n) as an n²×n² matrix acting on column-stacked vectors."""

    n: int
    matrix: np.ndarray

    def apply(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=complex)
        if X.shape != (self.n, self.n):
            raise DimensionMismatch(f"expected {self.n}x{self.n} input, got {X.shape}")
        return unvec(self.matrix @ vec(X), self.n)

    __call__ = apply

    def power(self, k: int) -> "Superoperator":
        return Superoperator(self.n, np.linalg.matrix_power(self.matrix, k))


def _check_input(alpha: KrausMap, X) -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    if X.shape != (alpha.dim, alpha.dim):
        raise DimensionMismatch(f"expected {alpha.dim}x{alpha.dim} input, got {X.shape}")
    return X


def apply(alpha: KrausMap, X) -> np.ndarray:
    X = _check_input(alpha, X)
    out = np.zeros_like(X)
    for L in alpha.kraus:
        out += L.conj().T @ X @ L
    return out


def power_apply(alpha: KrausMap, k: int, X) -> np.ndarray:
    if k < 0:
        raise InvalidArgument("power must be nonnegative")
    X = _check_input(alpha, X)
    for _ in range(k):
        X = apply(alpha, X)
    return X


def unit_image(alpha: KrausMap) -> np.ndarray:
    """α(I) = sum_i L_i^* L_i."""
    return sum(L.conj().T @ L for L in alpha.kraus)


def conjugate(alpha: KrausMap) -> KrausMap:
    """Trace dual α^*(Y) = sum_i L_i Y L_i^*."""
    return KrausMap([L.conj().T for L in alpha.kraus])


def to_superoperator(alpha: KrausMap) -> Superoperator:
    M = sum(np.kron(L.T, L.conj().T) for L in alpha.kraus)
    return Superoperator(alpha.dim, M)


def to_choi(alpha: KrausMap) -> ChoiMatrix:
    psis = np.stack([vec(L.conj().T) for L in alpha.kraus], axis=1)
    return ChoiMatrix(alpha.dim, psis @ psis.conj().T)


def superoperator_to_choi(S: Superoperator) -> ChoiMatrix:
    n = S.n
    C = np.zeros((n * n, n * n), dtype=complex)
    for i in range(n):
        for j in range(n):
            C[i * n:(i + 1) * n, j * n:(j + 1) * n] = unvec(S.matrix[:, j * n + i], n)
    return ChoiMatrix(n, C)


def _phase_fix(v: np.ndarray, tol: Tolerance) -> np.ndarray:
    nz = np.flatnonzero(np.abs(v) > tol.atol)
    if nz.size:
        c = v[nz[0]]
        v = v * (abs(c) / c)
    return v


def from_choi(C: ChoiMatrix, tol: Tolerance = DEFAULT_TOL) -> KrausMap:
    """Kraus list from the spectral decomposition of a PSD Choi matrix.

    Eigenpairs are taken in descending eigenvalue order and each eigenvector
    is phase-fixed (first nonzero component real positive), so the output is
    deterministic. The operators are linearly independent.
    """
    n = C.n
    M = np.asarray(C.matrix, dtype=complex)
    if M.shape != (n * n, n * n):
        raise DimensionMismatch(f"Choi matrix for n={n} must be {n*n}x{n*n}")
    herm = (M + M.conj().T) / 2
    w, v = np.linalg.eigh(herm)
    order = np.argsort(-w, kind="stable")
    w, v = w[order], v[:, order]
    scale = max(abs(w[0]), abs(w[-1]))
    if w[-1] < -tol.atol * max(1.0, scale):
        raise NotPSD(f"Choi matrix has eigenvalue {w[-1]:.3e}")
    mags = np.sort(np.abs(w))[::-1]
    keep = certified_split(mags, tol)
    if keep == 0:
        return zero_map(n)
    ops = []
    for lam, vecs in zip(w[:keep], v[:, :keep].T):
        psi = _phase_fix(vecs, tol)
        ops.append(np.sqrt(lam) * unvec(psi, n).conj().T)
    return KrausMap(ops)


def superoperator_to_kraus(S: Superoperator, tol: Tolerance = DEFAULT_TOL) -> KrausMap:
    return from_choi(superoperator_to_choi(S), tol)


def index(alpha: KrausMap, tol: Tolerance = DEFAULT_TOL) -> int:
    """Dimension of the metric operator space span{L_i}."""
    rows = np.stack([vec(L) for L in alpha.kraus])
    return rank(rows, tol)


def reduce_kraus(alpha: KrausMap, tol: Tolerance = DEFAULT_TOL) -> KrausMap:
    return from_choi(to_choi(alpha), tol)


def superoperator_distance(a, b) -> float:
    """Frobenius distance between superoperator matrices (accepts KrausMap or Superoperator)."""
    ma = a.matrix if isinstance(a, Superoperator) else to_superoperator(a).matrix
    mb = b.matrix if isinstance(b, Superoperator) else to_superoperator(b).matrix
    if ma.shape != mb.shape:
        raise DimensionMismatch("maps act on different spaces")
    return float(np.linalg.norm(ma - mb))


def unit_kernel(alpha: KrausMap, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    return kernel(unit_image(alpha), tol)


def unit_range(alpha: KrausMap, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    return range_space(unit_image(alpha), tol)


def annihilated_vectors(alpha: KrausMap, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """{x : α(|x><x|) = 0}, the common kernel of the adjoints L_i^*."""
    return common_kernel([L.conj().T for L in alpha.kraus], tol)


def adjoint_span(alpha: KrausMap, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """span{L_i^* u}: the joint column space of the adjoint Kraus operators."""
    return range_space(np.hstack([L.conj().T for L in alpha.kraus]), tol)


def trace_duality_gap(alpha: KrausMap, X, Y) -> float:
    """|tr(α(X)^* Y) - tr(X^* α^*(Y))|."""
    lhs = np.trace(apply(alpha, X).conj().T @ np.asarray(Y))
    rhs = np.trace(np.asarray(X).conj().T @ apply(conjugate(alpha), Y))
    return float(abs(lhs - rhs))


def normalized(alpha: KrausMap) -> tuple[KrausMap, float]:
    """Rescale so that ||α(I)||_op = 1; returns the map and the removed factor.

    ||α(I)||_op is the norm of α as a map on (B(H), ||.||_op), so the rescaled
    powers α^k(I) have operator norm at most 1. The zero map is returned as is.
    """
    z = float(np.linalg.norm(unit_image(alpha), 2))
    if z == 0.0:
        return alpha, 0.0
    return alpha.scaled(1.0 / z), z


def kraus_products(alpha: KrausMap, length: int):
    """Yield every product L_{i_1} ... L_{i_length} (d**length of them)."""
    for idx in product(range(alpha.d), repeat=length):
        P = np.eye(alpha.dim, dtype=complex)
        for i in idx:
            P = P @ alpha.kraus[i]
        yield idx, P
