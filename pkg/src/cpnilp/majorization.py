"""Invariant subspaces, the compressions β and γ, and the unordered majorization cone."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import nnls

from .cpmap import KrausMap
from .errors import InvalidArgument, LengthMismatch, NotInCone, NotInvariant
from .numerics import DEFAULT_TOL, Subspace, Tolerance, orthogonal_complement


@dataclass(frozen=True, eq=False)
class InvariantSplit:
    """Kraus operators written as [[B, 0], [D, C]] in the basis (M, N = M^⊥)."""

    M: Subspace
    N: Subspace
    blocks: tuple  # (B_i, C_i, D_i) per Kraus index

    @property
    def basis(self) -> np.ndarray:
        return np.hstack([self.M.basis, self.N.basis])

    def reassemble(self) -> list:
        W = self.basis
        out = []
        for B, C, D in self.blocks:
            top = np.hstack([B, np.zeros((self.M.dim, self.N.dim))])
            bottom = np.hstack([D, C])
            out.append(W @ np.vstack([top, bottom]) @ W.conj().T)
        return out


def _leak(alpha: KrausMap, M: Subspace, N: Subspace) -> list:
    PM, PN = M.projector, N.projector
    return [
        float(np.linalg.norm(PM @ L @ PN)) / max(1.0, float(np.linalg.norm(L)))
        for L in alpha.kraus
    ]


def is_invariant(alpha: KrausMap, M: Subspace, tol: Tolerance = DEFAULT_TOL) -> bool:
    """α leaves B(M) invariant, i.e. every Kraus operator leaves M^⊥ invariant."""
    if M.ambient_dim != alpha.dim:
        raise InvalidArgument("subspace and map live in different spaces")
    N = orthogonal_complement(M, tol)
    return all(x < tol.atol for x in _leak(alpha, M, N))


def split(alpha: KrausMap, M: Subspace, tol: Tolerance = DEFAULT_TOL) -> InvariantSplit:
    if M.ambient_dim != alpha.dim:
        raise InvalidArgument("subspace and map live in different spaces")
    N = orthogonal_complement(M, tol)
    leaks = _leak(alpha, M, N)
    if any(x >= tol.atol for x in leaks):
        raise NotInvariant(f"top-right block of size {max(leaks):.3e} does not vanish")
    W = np.hstack([M.basis, N.basis])
    m = M.dim
    blocks = []
    for L in alpha.kraus:
        Lw = W.conj().T @ L @ W
        blocks.append((Lw[:m, :m], Lw[m:, m:], Lw[m:, :m]))
    return InvariantSplit(M, N, tuple(blocks))


def compress(s: InvariantSplit) -> tuple[Optional[KrausMap], Optional[KrausMap]]:
    """(β on M, γ on N); a side is None when its subspace is {0}."""
    beta = KrausMap([B for B, _, _ in s.blocks]) if s.M.dim else None
    gamma = KrausMap([C for _, C, _ in s.blocks]) if s.N.dim else None
    return beta, gamma


def pad(t: Sequence[int], p: int) -> tuple:
    t = tuple(t)
    if len(t) > p:
        raise LengthMismatch(f"type of length {len(t)} cannot be padded to {p}")
    return t + (0,) * (p - len(t))


def check_theorem_3_1(a: Sequence[int], b: Sequence[int], c: Sequence[int]) -> bool:
    """Prefix sums of a are dominated by those of b + c, with equal totals.

    b and c are zero-padded to the length of a.
    """
    p = len(a)
    b, c = pad(b, p), pad(c, p)
    if sum(a) != sum(b) + sum(c):
        return False
    return all(sum(a[:k]) <= sum(b[:k]) + sum(c[:k]) for k in range(1, p + 1))


def random_invariant_instance(n: int, dimM: int, d: int, seed: int,
                              density: float = 0.6) -> tuple[KrausMap, Subspace]:
    """Random nilpotent α together with a coordinate subspace M invariant under it.

    Coordinates are grouped into consecutive flag blocks of random sizes; a
    Kraus entry (r, c) may be nonzero only when block(r) < block(c) (strictly
    block triangular, hence nilpotent) and it does not map an N coordinate
    into an M coordinate. A random permutation then relabels the coordinates.
    """
    if n < 1 or d < 1 or not 1 <= dimM <= n:
        raise InvalidArgument(f"need 1 <= dimM <= n and d >= 1, got n={n}, dimM={dimM}, d={d}")
    rng = np.random.default_rng(seed)
    p = int(rng.integers(1, n + 1))
    cuts = np.sort(rng.choice(np.arange(1, n), size=p - 1, replace=False)) if p > 1 else []
    block = np.zeros(n, dtype=int)
    for c in cuts:
        block[c:] += 1
    in_M = np.zeros(n, dtype=bool)
    in_M[rng.choice(n, size=dimM, replace=False)] = True
    allowed = (block[:, None] < block[None, :]) & ~(in_M[:, None] & ~in_M[None, :])
    ops = []
    for _ in range(d):
        G = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        mask = allowed & (rng.random((n, n)) < density)
        ops.append(np.where(mask, G, 0.0))
    perm = rng.permutation(n)
    P = np.eye(n)[:, perm]
    ops = [P @ L @ P.T for L in ops]
    M = Subspace(P[:, np.flatnonzero(in_M)].astype(complex))
    return KrausMap(ops), M


def _check_x(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise InvalidArgument("x must be a nonempty vector")
    if np.any(x <= 0):
        raise InvalidArgument("every x_i must be positive")
    return x


def cone_membership(x, y, tol: Tolerance = DEFAULT_TOL) -> bool:
    """y ∈ C(x): y >= 0, prefix sums of y below those of x, equal totals."""
    x = _check_x(x)
    y = np.asarray(y, dtype=float)
    if y.shape != x.shape:
        raise LengthMismatch(f"x has length {x.size}, y has length {y.size}")
    a = tol.atol
    if np.any(y < -a):
        return False
    sx, sy = np.cumsum(x), np.cumsum(y)
    if np.any(sy > sx + a):
        return False
    return bool(abs(sy[-1] - sx[-1]) <= a)


def extreme_points(x) -> list:
    """The 2^(n-1) extreme points of C(x).

    At each position 1..n-1 either y_i = 0 or the prefix sum is tight; the last
    coordinate closes the total. Patterns are enumerated with "tight" first, so
    the first point is x itself.
    """
    x = _check_x(x)
    S = np.cumsum(x)
    n = x.size
    points = []
    for pattern in product((True, False), repeat=n - 1):
        y = np.zeros(n)
        acc = 0.0
        for i, tight in enumerate(pattern):
            if tight:
                y[i] = S[i] - acc
                acc = S[i]
        y[-1] = S[-1] - acc
        points.append(y)
    return points


def _max_step(y: np.ndarray, x: np.ndarray, v: np.ndarray) -> float:
    """Largest t with y + t v in C(x) (v keeps the total fixed)."""
    t = np.inf
    neg = v < 0
    if np.any(neg):
        t = min(t, float(np.min(y[neg] / -v[neg])))
    sv = np.cumsum(v)[:-1]
    slack = (np.cumsum(x) - np.cumsum(y))[:-1]
    up = sv > 0
    if np.any(up):
        t = min(t, float(np.min(slack[up] / sv[up])))
    return max(t, 0.0)


def verify_extreme(x, y, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Brute-force extremality test by two-sided pairwise transfers.

    y is not extreme iff some direction e_i - e_j (i < j) can be followed both
    ways by more than 10·atol without leaving C(x). For this polytope the
    pairwise directions span every feasible direction, so the test is exact.
    """
    x = _check_x(x)
    y = np.asarray(y, dtype=float)
    if not cone_membership(x, y, tol):
        raise NotInCone(f"{y.tolist()} is not in C({x.tolist()})")
    y = np.clip(y, 0.0, None)
    eps = 10 * tol.atol
    n = x.size
    for i in range(n):
        for j in range(i + 1, n):
            v = np.zeros(n)
            v[i], v[j] = 1.0, -1.0
            if _max_step(y, x, v) > eps and _max_step(y, x, -v) > eps:
                return False
    return True


def sample_cone(x, rng: np.random.Generator) -> np.ndarray:
    """Random point of C(x) drawn coordinate by coordinate inside the remaining slack."""
    x = _check_x(x)
    S = np.cumsum(x)
    y = np.zeros(x.size)
    acc = 0.0
    for i in range(x.size - 1):
        y[i] = rng.uniform(0.0, S[i] - acc)
        acc += y[i]
    y[-1] = S[-1] - acc
    return y


def convex_weights(points: Sequence[np.ndarray], y) -> tuple[np.ndarray, float]:
    """Nonnegative weights summing to 1 that best reproduce y, and the residual norm."""
    E = np.column_stack(points)
    A = np.vstack([E, np.ones((1, E.shape[1]))])
    b = np.concatenate([np.asarray(y, dtype=float), [1.0]])
    w, res = nnls(A, b)
    return w, float(res)

