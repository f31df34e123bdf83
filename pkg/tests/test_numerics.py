import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpnilp.errors import DimensionMismatch, IllConditioned, InvalidArgument
from cpnilp.numerics import (
    DEFAULT_TOL,
    Subspace,
    Tolerance,
    certified_split,
    common_kernel,
    containment_residual,
    intersect_with_complement,
    is_psd,
    kernel,
    orthogonal_complement,
    range_space,
    rank,
    subspace_distance,
)


def test_tolerance_validation():
    with pytest.raises(InvalidArgument):
        Tolerance(atol=-1.0)
    with pytest.raises(InvalidArgument):
        Tolerance(gap_ratio=0.5)
    assert DEFAULT_TOL.cutoff(1e6) == pytest.approx(1e-2)
    assert DEFAULT_TOL.cutoff(1.0) == 1e-8


@pytest.mark.parametrize("s, expected", [
    ([], 0),
    ([1.0, 0.5, 0.0], 2),
    ([3.0, 1e-20], 1),
    ([0.0, 0.0], 0),
    ([1.0, 1.0, 1.0], 3),
])
def test_certified_split_clear_gaps(s, expected):
    assert certified_split(np.array(s), DEFAULT_TOL) == expected


def test_certified_split_refuses_ambiguous_spectrum():
    # kept 1e-7 vs dropped 1e-9: ratio 100 < 1e4
    with pytest.raises(IllConditioned):
        certified_split(np.array([1.0, 1e-7, 1e-9]), Tolerance(rtol=1e-8, atol=1e-10))


def test_rank_matches_numpy_on_integer_matrices(rng):
    for _ in range(50):
        r = int(rng.integers(0, 5))
        A = rng.integers(-3, 4, size=(5, r)) @ rng.integers(-3, 4, size=(r, 6))
        try:
            got = rank(A)
        except IllConditioned:
            continue
        assert got == np.linalg.matrix_rank(A)


def test_kernel_and_range_are_complementary(rng):
    A = rng.normal(size=(4, 2)) @ rng.normal(size=(2, 4))
    K = kernel(A)
    R = range_space(A.conj().T)
    assert K.dim == 2 and R.dim == 2
    assert np.allclose(A @ K.basis, 0, atol=1e-12)
    assert K.orthonormality_defect() < 1e-12
    assert subspace_distance(orthogonal_complement(K), R) < 1e-10


def test_kernel_of_empty_row_matrix_is_everything():
    assert kernel(np.zeros((0, 3))).dim == 3


def test_common_kernel_intersects():
    A = np.diag([1.0, 0.0, 0.0])
    B = np.diag([0.0, 1.0, 0.0])
    K = common_kernel([A, B])
    assert subspace_distance(K, Subspace.coordinate(3, [2])) < 1e-12
    with pytest.raises(DimensionMismatch):
        common_kernel([np.eye(2), np.eye(3)])
    with pytest.raises(InvalidArgument):
        common_kernel([])


def test_intersect_with_complement_coordinate_case():
    S = Subspace.coordinate(4, [0, 1, 2])
    T = Subspace.coordinate(4, [1])
    got = intersect_with_complement(S, T)
    assert subspace_distance(got, Subspace.coordinate(4, [0, 2])) < 1e-12


def test_is_psd():
    assert is_psd(np.diag([1.0, 0.0]))
    assert not is_psd(np.diag([1.0, -1e-3]))
    assert not is_psd(np.array([[0, 1], [0, 0]]))
    assert is_psd(np.diag([1.0, -1e-12]))


def test_containment_residual():
    S = Subspace.coordinate(3, [0])
    assert containment_residual(S, Subspace.coordinate(3, [0, 1])) == 0.0
    assert containment_residual(S, Subspace.coordinate(3, [2])) == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 6), st.integers(0, 2**32 - 1))
def test_rank_nullity(n, r, seed):
    r = min(r, n)
    g = np.random.default_rng(seed)
    A = (g.normal(size=(n, r)) + 1j * g.normal(size=(n, r))) @ g.normal(size=(r, n))
    k = kernel(A)
    assert rank(A) + k.dim == n
    assert rank(A) == r
    assert np.linalg.norm(A @ k.basis) < 1e-8 * max(1.0, np.linalg.norm(A))
