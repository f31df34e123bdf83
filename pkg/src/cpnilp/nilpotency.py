"""Nilpotent CP maps: order, flag, CP nilpotent type and the inequalities it obeys.

Zero tests on α^k(I) are made on the rescaled map with ||α(I)||_op = 1, which
makes them invariant under α -> cα. Types are returned as plain tuples of ints.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .cpmap import KrausMap, conjugate, normalized, to_superoperator, unit_image
from .errors import IllConditioned, InvalidType, LengthMismatch, NotNilpotent
from .numerics import (
    DEFAULT_TOL,
    Subspace,
    Tolerance,
    intersect_with_complement,
    kernel,
    rank,
)


@dataclass(frozen=True, eq=False)
class FlagDecomposition:
    """H = H_1 ⊕ ... ⊕ H_p with H_1 ⊕ ... ⊕ H_k = ker α^k(I)."""

    subspaces: tuple

    @property
    def projections(self) -> list:
        return [S.projector for S in self.subspaces]

    @property
    def dims(self) -> tuple:
        return tuple(S.dim for S in self.subspaces)

    def __len__(self):
        return len(self.subspaces)


def _classify_zero(value: float, tol: Tolerance, what: str) -> bool:
    if value < tol.atol:
        return True
    if value < tol.gap_ratio * tol.atol:
        raise IllConditioned(f"{what} = {value:.3e} is inside the ambiguous band")
    return False


def unit_powers(alpha: KrausMap, upto: int) -> list:
    """[α(I), α²(I), ..., α^upto(I)] computed by iteration."""
    out = []
    X = unit_image(alpha)
    for _ in range(upto):
        out.append(X)
        X = sum(L.conj().T @ X @ L for L in alpha.kraus)
    return out


def nilpotency_order(alpha: KrausMap, tol: Tolerance = DEFAULT_TOL) -> Optional[int]:
    """Least p with α^p = 0, or None. Searched up to p = dim, which always suffices."""
    z = float(np.linalg.norm(unit_image(alpha), 2))
    if _classify_zero(z, tol, "||α(I)||"):
        return 1
    unit, _ = normalized(alpha)
    powers = unit_powers(unit, alpha.dim)
    for k in range(2, alpha.dim + 1):
        if _classify_zero(float(np.linalg.norm(powers[k - 1])), tol, f"||α^{k}(I)||"):
            return k
    return None


def is_nilpotent(alpha: KrausMap, tol: Tolerance = DEFAULT_TOL) -> bool:
    return nilpotency_order(alpha, tol) is not None


def _require_order(alpha: KrausMap, tol: Tolerance) -> int:
    p = nilpotency_order(alpha, tol)
    if p is None:
        raise NotNilpotent(f"{alpha!r} is not nilpotent (α^n(I) != 0)")
    return p


def kernel_chain(alpha: KrausMap, tol: Tolerance = DEFAULT_TOL) -> list:
    """[ker α(I), ker α²(I), ..., ker α^p(I) = H] for a nilpotent α."""
    p = _require_order(alpha, tol)
    unit, _ = normalized(alpha)
    powers = unit_powers(unit, p - 1)
    chain = [kernel(X, tol) for X in powers]
    chain.append(Subspace.full(alpha.dim))
    return chain


def flag(alpha: KrausMap, tol: Tolerance = DEFAULT_TOL) -> FlagDecomposition:
    chain = kernel_chain(alpha, tol)
    parts = [chain[0]]
    for prev, cur in zip(chain, chain[1:]):
        part = intersect_with_complement(cur, prev, tol)
        if part.dim != cur.dim - prev.dim:
            raise IllConditioned("kernel chain is not nested within tolerance")
        parts.append(part)
    return FlagDecomposition(tuple(parts))


def cp_type(alpha: KrausMap, tol: Tolerance = DEFAULT_TOL) -> tuple:
    return flag(alpha, tol).dims


def adjoint_type(alpha: KrausMap, tol: Tolerance = DEFAULT_TOL) -> tuple:
    return cp_type(conjugate(alpha), tol)


def check_basic_inequalities(t: Sequence[int], d: int) -> bool:
    t = list(t)
    if d < 1 or not t or any(a < 1 for a in t):
        return False
    return all(t[i + 1] <= d * t[i] for i in range(len(t) - 1))


def synthesize(t: Sequence[int], d: int) -> KrausMap:
    """A nilpotent CP map with exactly ``d`` Kraus operators and CP type ``t``.

    C^n is split into consecutive coordinate blocks of sizes t. The j-th basis
    vector of block i+1 is reached by map number j % d from source vector
    j // d of block i; the Kraus operator is the adjoint of that assignment,
    so L_k sends block i+1 back into block i.
    """
    t = [int(a) for a in t]
    if not check_basic_inequalities(t, d):
        raise InvalidType(f"type {tuple(t)} with d={d} violates a_(i+1) <= d*a_i or has entries < 1")
    n = sum(t)
    offsets = np.concatenate([[0], np.cumsum(t)])
    ops = [np.zeros((n, n), dtype=complex) for _ in range(d)]
    for i in range(len(t) - 1):
        for j in range(t[i + 1]):
            ops[j % d][offsets[i] + j // d, offsets[i + 1] + j] = 1.0
    return KrausMap(ops)


def check_theorem_2_7(a: Sequence[int], a_adj: Sequence[int]) -> bool:
    """Suffix sums of the type are dominated by prefix sums of the adjoint type."""
    a, a_adj = list(a), list(a_adj)
    if len(a) != len(a_adj):
        raise LengthMismatch(f"types of length {len(a)} and {len(a_adj)}")
    p = len(a)
    if sum(a) != sum(a_adj):
        return False
    return all(sum(a[p - i:]) <= sum(a_adj[:i]) for i in range(1, p + 1))


def check_block_triangular(alpha: KrausMap, f: FlagDecomposition, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Every L_k maps H_(i+1) into H_1 ⊕ ... ⊕ H_i and kills H_1."""
    unit, _ = normalized(alpha)
    projs = f.projections
    p = len(projs)
    n = alpha.dim
    for L in unit.kraus:
        bound = tol.atol * max(1.0, float(np.linalg.norm(L)))
        if np.linalg.norm(L @ projs[0]) > bound:
            return False
        for i in range(1, p):
            tail = sum(projs[i:], np.zeros((n, n)))
            if np.linalg.norm(tail @ L @ projs[i]) > bound:
                return False
    return True


def commuting_flags_report(alpha: KrausMap, tol: Tolerance = DEFAULT_TOL) -> Optional[np.ndarray]:
    """m[i, j] = dim(H^(i+1) ∩ H_(j+1)) when all flag projections commute, else None.

    H_j is the flag of α and H^i the flag of α^*. Row sums reproduce the
    adjoint type, column sums the type, and m vanishes below the anti-diagonal.
    """
    lower = flag(alpha, tol).projections
    upper = flag(conjugate(alpha), tol).projections
    if len(lower) != len(upper):
        raise IllConditioned("α and α^* were assigned different orders")
    for P in upper:
        for Q in lower:
            if np.linalg.norm(P @ Q - Q @ P) > tol.atol * max(1.0, float(np.linalg.norm(P))):
                return None
    p = len(lower)
    m = np.zeros((p, p), dtype=int)
    for i, P in enumerate(upper):
        for j, Q in enumerate(lower):
            m[i, j] = rank(P @ Q, tol)
    a = [int(round(np.trace(Q).real)) for Q in lower]
    a_adj = [int(round(np.trace(P).real)) for P in upper]
    assert list(m.sum(axis=0)) == a, (m, a)
    assert list(m.sum(axis=1)) == a_adj, (m, a_adj)
    assert all(m[i, j] == 0 for i in range(p) for j in range(p) if i + j > p - 1), m
    return m


def linear_nilpotent_type(alpha: KrausMap, tol: Tolerance = DEFAULT_TOL) -> tuple:
    """Kernel-dimension increments (l_1, ..., l_p) of α as a linear map on B(H)."""
    p = _require_order(alpha, tol)
    unit, _ = normalized(alpha)
    S = to_superoperator(unit).matrix
    N = S.shape[0]
    dims = [0]
    power = np.eye(N, dtype=complex)
    for _ in range(p):
        power = power @ S
        dims.append(N - rank(power, tol))
    if dims[-1] != N:
        raise IllConditioned("superoperator power does not vanish at the CP order")
    return tuple(dims[i] - dims[i - 1] for i in range(1, p + 1))


def l_lower_bounds(a_adj: Sequence[int]) -> list:
    """(A_k)^2 + 2 A_k (total - A_k) with A_k the k-th prefix sum of the adjoint type."""
    a_adj = list(a_adj)
    out = []
    for k in range(1, len(a_adj) + 1):
        head = sum(a_adj[:k])
        rest = sum(a_adj[k:])
        out.append(head * head + 2 * head * rest)
    return out


def check_l_lower_bound(l: Sequence[int], a_adj: Sequence[int]) -> bool:
    """Prefix sums of the linear type dominate the bound built from the adjoint CP type.

    The complementary sum runs over the adjoint type's own indices k+1..p.
    """
    l = list(l)
    if len(l) != len(a_adj):
        raise LengthMismatch(f"types of length {len(l)} and {len(a_adj)}")
    bounds = l_lower_bounds(a_adj)
    return all(sum(l[:k + 1]) >= bounds[k] for k in range(len(l)))
