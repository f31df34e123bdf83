"""Gap-certified dense linear algebra.

Every integer that leaves this module (a rank, a dimension) has been read off
a singular-value spectrum whose kept and dropped parts are separated by at
least ``Tolerance.gap_ratio``. When that separation is missing the instance is
numerically ambiguous and :class:`IllConditioned` is raised instead of a guess.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, IllConditioned, InvalidArgument


@dataclass(frozen=True)
class Tolerance:
    rtol: float = 1e-8
    atol: float = 1e-10
    gap_ratio: float = 1e4

    def __post_init__(self):
        if self.rtol < 0 or self.atol < 0:
            raise InvalidArgument("rtol and atol must be nonnegative")
        if self.gap_ratio < 1:
            raise InvalidArgument("gap_ratio must be >= 1")

    def cutoff(self, largest: float) -> float:
        return max(self.atol, self.rtol * largest)

    def as_dict(self) -> dict:
        return {"atol": self.atol, "rtol": self.rtol, "gap_ratio": self.gap_ratio}


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of C^ambient_dim stored through an orthonormal basis (columns)."""

    basis: np.ndarray
    ambient_dim: int = field(init=False)
    dim: int = field(init=False)

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=complex)
        if basis.ndim != 2:
            raise InvalidArgument("basis must be a 2-d array")
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "ambient_dim", basis.shape[0])
        object.__setattr__(self, "dim", basis.shape[1])

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(np.zeros((n, 0), dtype=complex))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(np.eye(n, dtype=complex))

    @classmethod
    def coordinate(cls, n: int, indices: Sequence[int]) -> "Subspace":
        """Span of the standard basis vectors e_i, i in ``indices`` (0-based)."""
        return cls(np.eye(n, dtype=complex)[:, list(indices)])

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def orthonormality_defect(self) -> float:
        if self.dim == 0:
            return 0.0
        gram = self.basis.conj().T @ self.basis
        return float(np.max(np.abs(gram - np.eye(self.dim))))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"


def certified_split(s: np.ndarray, tol: Tolerance) -> int:
    """Number of singular values kept above the cutoff.

    ``s`` must be sorted in decreasing order. Raises IllConditioned when the
    smallest kept value is not at least ``gap_ratio`` times the largest
    dropped one.
    """
    s = np.asarray(s, dtype=float)
    if s.size == 0:
        return 0
    cut = tol.cutoff(float(s[0]))
    keep = int(np.count_nonzero(s > cut))
    if 0 < keep < s.size:
        kept_min, dropped_max = s[keep - 1], s[keep]
        if dropped_max > 0 and kept_min < tol.gap_ratio * dropped_max:
            raise IllConditioned(
                f"no certified gap: smallest kept singular value {kept_min:.3e}, "
                f"largest dropped {dropped_max:.3e}, cutoff {cut:.3e}"
            )
    return keep


def _as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidArgument("matrix has non-finite entries")
    return A


def rank(A, tol: Tolerance = DEFAULT_TOL) -> int:
    A = _as_matrix(A)
    if A.size == 0:
        return 0
    return certified_split(np.linalg.svd(A, compute_uv=False), tol)


def kernel(A, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    A = _as_matrix(A)
    cols = A.shape[1]
    if A.shape[0] == 0:
        return Subspace.full(cols)
    _, s, vh = np.linalg.svd(A, full_matrices=True)
    r = certified_split(s, tol)
    return Subspace(vh[r:].conj().T)


def range_space(A, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Column space of ``A``."""
    A = _as_matrix(A)
    if A.shape[1] == 0:
        return Subspace.zero(A.shape[0])
    u, s, _ = np.linalg.svd(A, full_matrices=False)
    r = certified_split(s, tol)
    return Subspace(u[:, :r])


def common_kernel(As: Sequence, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Intersection of the kernels of all matrices in ``As``."""
    mats = [_as_matrix(A) for A in As]
    if not mats:
        raise InvalidArgument("common_kernel needs at least one matrix")
    cols = {A.shape[1] for A in mats}
    if len(cols) != 1:
        raise DimensionMismatch(f"column counts differ: {sorted(cols)}")
    return kernel(np.vstack(mats), tol)


def intersect_with_complement(S: Subspace, T: Subspace, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """S ∩ T^⊥, as the kernel of the stacked operator (I - P_S; P_T)."""
    if S.ambient_dim != T.ambient_dim:
        raise DimensionMismatch("subspaces live in different ambient spaces")
    n = S.ambient_dim
    stacked = np.vstack([np.eye(n) - S.projector, T.projector])
    return kernel(stacked, tol)


def orthogonal_complement(S: Subspace, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    if S.dim == 0:
        return Subspace.full(S.ambient_dim)
    return kernel(S.basis.conj().T, tol)


def is_psd(A, tol: Tolerance = DEFAULT_TOL) -> bool:
    A = _as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise DimensionMismatch("is_psd needs a square matrix")
    if A.size == 0:
        return True
    scale = max(1.0, float(np.linalg.norm(A, 2)))
    if np.max(np.abs(A - A.conj().T)) > tol.atol * scale:
        return False
    herm = (A + A.conj().T) / 2
    return bool(np.linalg.eigvalsh(herm)[0] >= -tol.atol * scale)


def subspace_distance(S: Subspace, T: Subspace) -> float:
    """Frobenius distance between the orthogonal projections; 0 iff S = T."""
    if S.ambient_dim != T.ambient_dim:
        raise DimensionMismatch("subspaces live in different ambient spaces")
    return float(np.linalg.norm(S.projector - T.projector))


def containment_residual(S: Subspace, T: Subspace) -> float:
    """How far S sticks out of T: ||(I - P_T) basis_S||."""
    if S.ambient_dim != T.ambient_dim:
        raise DimensionMismatch("subspaces live in different ambient spaces")
    if S.dim == 0:
        return 0.0
    return float(np.linalg.norm(S.basis - T.projector @ S.basis))
