"""Roots of pure states and their relation to contractive nilpotent CP maps.

A unital CP map τ on B(H) is a p-th root of the pure state of a unit vector u
when τ^p(X) = <u, X u> I for every X. Compressing such τ to u^⊥ gives a
nilpotent CP map; conversely :func:`build_root` extends a contractive
nilpotent α on B(H_0) to a root on B(C ⊕ H_0).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .cpmap import (
    KrausMap,
    Superoperator,
    matrix_unit,
    power_apply,
    superoperator_to_choi,
    superoperator_to_kraus,
    to_superoperator,
    unit_image,
    unvec,
    vec,
)
from .errors import InvalidArgument, NotARoot, NotContractive, NotNilpotent
from .nilpotency import nilpotency_order
from .numerics import DEFAULT_TOL, Tolerance, is_psd

Map = Union[KrausMap, Superoperator]

NOT_CP = "NotCP"
NOT_UNITAL = "NotUnital"
POWER_MISMATCH = "PowerMismatch"


@dataclass(frozen=True, eq=False)
class RootCandidate:
    tau: Map
    u: np.ndarray
    order_claim: int

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex).reshape(-1)
        object.__setattr__(self, "u", u)
        if self.order_claim < 1:
            raise InvalidArgument("order_claim must be a positive integer")
        if u.size != _dim(self.tau):
            raise InvalidArgument(f"u has length {u.size}, map acts on C^{_dim(self.tau)}")
        if abs(np.linalg.norm(u) - 1.0) > 1e-8:
            raise InvalidArgument("u must be a unit vector")


@dataclass(frozen=True)
class RootVerdict:
    ok: bool
    reason: Optional[str] = None
    residual: float = 0.0

    def __bool__(self):
        return self.ok


def _dim(tau: Map) -> int:
    return tau.dim if isinstance(tau, KrausMap) else tau.n


def _superop(tau: Map) -> Superoperator:
    return to_superoperator(tau) if isinstance(tau, KrausMap) else tau


def state_map(u) -> Superoperator:
    """X -> <u, X u> I as a superoperator."""
    u = np.asarray(u, dtype=complex).reshape(-1)
    n = u.size
    # <u, X u> = vec(X) . vec(conj(u) u^T)
    row = vec(np.outer(u.conj(), u))
    return Superoperator(n, np.outer(vec(np.eye(n)), row))


def diagnose_root(r: RootCandidate, tol: Tolerance = DEFAULT_TOL) -> RootVerdict:
    S = _superop(r.tau)
    n = S.n
    if isinstance(r.tau, Superoperator) and not is_psd(superoperator_to_choi(S).matrix, tol):
        return RootVerdict(False, NOT_CP)
    unital_err = float(np.linalg.norm(S.apply(np.eye(n)) - np.eye(n)))
    if unital_err >= tol.atol * np.sqrt(n):
        return RootVerdict(False, NOT_UNITAL, unital_err)
    Sp = np.linalg.matrix_power(S.matrix, r.order_claim)
    u = r.u
    worst = 0.0
    for i in range(n):
        for j in range(n):
            out = unvec(Sp[:, j * n + i], n)
            worst = max(worst, float(np.linalg.norm(out - u[i].conj() * u[j] * np.eye(n))))
    if worst >= tol.atol:
        return RootVerdict(False, POWER_MISMATCH, worst)
    return RootVerdict(True, None, worst)


def is_root_of_state(r: RootCandidate, tol: Tolerance = DEFAULT_TOL) -> bool:
    return diagnose_root(r, tol).ok


def householder_completion(u) -> np.ndarray:
    """Unitary Q with Q e_1 = u; columns 2..n span u^⊥.

    Q = H diag(φ, 1, ..., 1) with H the reflection sending φ e_1 to u, where φ
    is the phase of u_1. When u = e_1 this is the identity.
    """
    u = np.asarray(u, dtype=complex).reshape(-1)
    n = u.size
    phi = u[0] / abs(u[0]) if abs(u[0]) > 0 else 1.0
    w = -u.copy()
    w[0] += phi
    nw = np.linalg.norm(w)
    H = np.eye(n, dtype=complex)
    if nw > 1e-15:
        w /= nw
        H -= 2.0 * np.outer(w, w.conj())
    Q = H.copy()
    Q[:, 0] *= phi
    return Q


def compress_to_nilpotent(r: RootCandidate, tol: Tolerance = DEFAULT_TOL) -> KrausMap:
    """Compression of the root τ to B(u^⊥): Y -> V^* τ(V Y V^*) V."""
    verdict = diagnose_root(r, tol)
    if not verdict:
        raise NotARoot(f"candidate is not a root of its state ({verdict.reason})")
    n = _dim(r.tau)
    if n < 2:
        raise InvalidArgument("u^⊥ is trivial for a one-dimensional space")
    V = householder_completion(r.u)[:, 1:]
    if isinstance(r.tau, KrausMap):
        return KrausMap([V.conj().T @ K @ V for K in r.tau.kraus])
    S = r.tau.matrix
    compressed = np.kron(V.T, V.conj().T) @ S @ np.kron(V.conj(), V)
    return superoperator_to_kraus(Superoperator(n - 1, compressed), tol)


def is_contractive(alpha: KrausMap, tol: Tolerance = DEFAULT_TOL) -> bool:
    return is_psd(np.eye(alpha.dim) - unit_image(alpha), tol)


def root_action(alpha: KrausMap, X, k: int = 1) -> np.ndarray:
    """Closed form of τ^k(X) = [[X11, 0], [0, α^k(X22) + X11 (I - α^k(I))]]."""
    X = np.asarray(X, dtype=complex)
    m = alpha.dim
    x11 = X[0, 0]
    out = np.zeros_like(X)
    out[0, 0] = x11
    ak_unit = power_apply(alpha, k, np.eye(m))
    out[1:, 1:] = power_apply(alpha, k, X[1:, 1:]) + x11 * (np.eye(m) - ak_unit)
    return out


def root_superoperator(alpha: KrausMap) -> Superoperator:
    n = alpha.dim + 1
    cols = [vec(root_action(alpha, matrix_unit(n, i, j))) for j in range(n) for i in range(n)]
    return Superoperator(n, np.column_stack(cols))


def build_root(alpha: KrausMap, tol: Tolerance = DEFAULT_TOL) -> RootCandidate:
    """Extend a contractive nilpotent α on C^m to a p-th root on C^(1+m) with u = e_1."""
    if not is_contractive(alpha, tol):
        raise NotContractive("I - α(I) is not positive")
    p = nilpotency_order(alpha, tol)
    if p is None:
        raise NotNilpotent(f"{alpha!r} is not nilpotent")
    u = np.zeros(alpha.dim + 1, dtype=complex)
    u[0] = 1.0
    return RootCandidate(root_superoperator(alpha), u, p)


def root_kraus(r: RootCandidate, tol: Tolerance = DEFAULT_TOL) -> RootCandidate:
    """Same candidate with τ converted to Kraus form through its Choi matrix."""
    if isinstance(r.tau, KrausMap):
        return r
    return RootCandidate(superoperator_to_kraus(r.tau, tol), r.u, r.order_claim)


def check_power_formula(alpha: KrausMap, k: int, tol: Tolerance = DEFAULT_TOL) -> bool:
    if k < 1:
        raise InvalidArgument("k must be >= 1")
    tau = build_root(alpha, tol).tau
    Sk = np.linalg.matrix_power(tau.matrix, k)
    n = tau.n
    for i in range(n):
        for j in range(n):
            E = matrix_unit(n, i, j)
            got = unvec(Sk @ vec(E), n)
            if np.linalg.norm(got - root_action(alpha, E, k)) >= tol.atol:
                return False
    return True


def monotone_chain(r: RootCandidate, upto: int, tol: Tolerance = DEFAULT_TOL) -> list:
    """For m = 1..upto, whether τ^m(|u><u|) >= |u><u| and τ^m(I - |u><u|) <= I - |u><u| hold."""
    S = _superop(r.tau)
    n = S.n
    Pu = np.outer(r.u, r.u.conj())
    Q = np.eye(n) - Pu
    out = []
    X, Y = Pu, Q
    for _ in range(upto):
        X, Y = S.apply(X), S.apply(Y)
        out.append(is_psd(X - Pu, tol) and is_psd(Q - Y, tol))
    return out
