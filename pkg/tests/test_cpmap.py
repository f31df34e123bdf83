import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpnilp.cpmap import (
    KrausMap,
    Superoperator,
    adjoint_span,
    annihilated_vectors,
    apply,
    conjugate,
    from_choi,
    identity_channel,
    index,
    kraus_products,
    matrix_unit,
    normalized,
    power_apply,
    reduce_kraus,
    superoperator_distance,
    superoperator_to_choi,
    superoperator_to_kraus,
    to_choi,
    to_superoperator,
    trace_duality_gap,
    unit_image,
    unit_kernel,
    unit_range,
    unvec,
    vec,
    zero_map,
)
from cpnilp.ensembles import random_cp_map, random_unitary
from cpnilp.errors import DimensionMismatch, InvalidArgument, NotPSD
from cpnilp.numerics import Subspace, common_kernel, is_psd, subspace_distance


def probe_superoperator(alpha):
    """Column (j*n + i) is vec(α(E_ij)); built without the Kronecker formula."""
    n = alpha.dim
    cols = [vec(apply(alpha, matrix_unit(n, i, j))) for j in range(n) for i in range(n)]
    return np.column_stack(cols)


def probe_choi(alpha):
    n = alpha.dim
    return sum(np.kron(matrix_unit(n, i, j), apply(alpha, matrix_unit(n, i, j)))
               for i in range(n) for j in range(n))


def test_vec_is_column_stacking():
    X = np.array([[1, 2], [3, 4]])
    assert vec(X).tolist() == [1, 3, 2, 4]
    assert np.array_equal(unvec(vec(X)), X)


def test_kraus_map_validation():
    with pytest.raises(InvalidArgument):
        KrausMap([])
    with pytest.raises(DimensionMismatch):
        KrausMap([np.eye(2), np.eye(3)])
    with pytest.raises(DimensionMismatch):
        KrausMap([np.ones((2, 3))])
    with pytest.raises(InvalidArgument):
        KrausMap([np.array([[np.nan]])])
    alpha = KrausMap([np.eye(2)])
    with pytest.raises(ValueError):
        alpha.kraus[0][0, 0] = 5


def test_shift_action(shift):
    # α(E_11) = L^* E_11 L = E_22
    assert np.array_equal(shift(matrix_unit(2, 0, 0)), matrix_unit(2, 1, 1))
    assert np.array_equal(unit_image(shift), np.diag([0, 1]))
    assert np.allclose(power_apply(shift, 2, np.eye(2)), 0)
    with pytest.raises(DimensionMismatch):
        shift(np.eye(3))


def test_shift_superoperator_has_one_entry(shift):
    S = to_superoperator(shift).matrix
    expected = np.zeros((4, 4))
    expected[3, 0] = 1.0
    assert np.array_equal(S, expected)


def test_shift_choi(shift):
    C = to_choi(shift).matrix
    assert is_psd(C)
    assert np.trace(C).real == pytest.approx(1.0)
    back = from_choi(to_choi(shift))
    assert back.d == 1
    assert np.allclose(np.abs(back.kraus[0]), np.abs(shift.kraus[0]))


def test_conjugate_of_shift(shift):
    assert np.array_equal(conjugate(shift).kraus[0], np.array([[0, 0], [1, 0]]))


@pytest.mark.parametrize("alpha, expected_dim", [
    (identity_channel(3), 0),
    (zero_map(3), 3),
])
def test_unit_kernel_trivial_cases(alpha, expected_dim):
    assert unit_kernel(alpha).dim == expected_dim
    assert annihilated_vectors(alpha).dim == expected_dim
    assert unit_range(alpha).dim == 3 - expected_dim


def test_shift_kernels(shift):
    e1, e2 = Subspace.coordinate(2, [0]), Subspace.coordinate(2, [1])
    assert subspace_distance(unit_kernel(shift), e1) < 1e-12
    assert subspace_distance(unit_range(shift), e2) < 1e-12
    assert subspace_distance(annihilated_vectors(shift), e2) < 1e-12


def test_zero_map_choi_round_trip():
    back = from_choi(to_choi(zero_map(2)))
    assert back.d == 1 and np.all(back.kraus[0] == 0)
    assert index(zero_map(2)) == 0


def test_from_choi_rejects_indefinite():
    C = np.diag([1.0, 0.0, 0.0, -1.0]).astype(complex)
    from cpnilp.cpmap import ChoiMatrix
    with pytest.raises(NotPSD):
        from_choi(ChoiMatrix(2, C))


def test_from_choi_is_deterministic(rng):
    alpha = random_cp_map(rng)
    a, b = reduce_kraus(alpha), reduce_kraus(alpha)
    assert all(np.array_equal(x, y) for x, y in zip(a.kraus, b.kraus))


def test_index_is_representation_independent(rng):
    for _ in range(20):
        alpha = random_cp_map(rng)
        U = random_unitary(alpha.d, rng)
        mixed = KrausMap([sum(U[j, i] * L for i, L in enumerate(alpha.kraus)) for j in range(alpha.d)])
        assert superoperator_distance(alpha, mixed) < 1e-10
        assert index(alpha) == index(mixed)


def test_reduce_kraus_drops_dependent_operators(rng):
    L = rng.normal(size=(3, 3))
    alpha = KrausMap([L, 2 * L, -L])
    red = reduce_kraus(alpha)
    assert red.d == index(alpha) == 1
    assert superoperator_distance(alpha, red) < 1e-10


def test_superoperator_and_choi_views(rng):
    for _ in range(10):
        alpha = random_cp_map(rng)
        S = to_superoperator(alpha)
        assert np.allclose(S.matrix, probe_superoperator(alpha))
        assert np.allclose(to_choi(alpha).matrix, probe_choi(alpha))
        assert np.allclose(superoperator_to_choi(S).matrix, probe_choi(alpha))
        X = rng.normal(size=(alpha.dim, alpha.dim))
        assert np.allclose(S(X), alpha(X))
        assert np.allclose(S.power(3)(X), power_apply(alpha, 3, X))
        back = superoperator_to_kraus(S)
        assert superoperator_distance(back, S) < 1e-8 * max(1.0, np.linalg.norm(S.matrix))


def test_normalized_scales_unit_image(rng):
    alpha = random_cp_map(rng)
    unit, z = normalized(alpha)
    if z:
        assert np.linalg.norm(unit_image(unit), 2) == pytest.approx(1.0)
        assert superoperator_distance(unit.scaled(z), alpha) < 1e-8 * z
    assert normalized(zero_map(2))[1] == 0.0


def test_kraus_products_count(two_arrow):
    words = list(kraus_products(two_arrow, 2))
    assert len(words) == 4
    assert all(np.all(P == 0) for _, P in words)
    assert len(list(kraus_products(two_arrow, 0))) == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_unit_kernel_is_common_kernel(seed):
    g = np.random.default_rng(seed)
    alpha = random_cp_map(g)
    assert subspace_distance(unit_kernel(alpha), common_kernel(alpha.kraus)) < 1e-8
    assert subspace_distance(unit_range(alpha), adjoint_span(alpha)) < 1e-8


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_trace_duality(seed):
    g = np.random.default_rng(seed)
    alpha, _ = normalized(random_cp_map(g))
    n = alpha.dim
    X = g.normal(size=(n, n)) + 1j * g.normal(size=(n, n))
    Y = g.normal(size=(n, n)) + 1j * g.normal(size=(n, n))
    assert trace_duality_gap(alpha, X, Y) < 1e-8 * np.linalg.norm(X) * np.linalg.norm(Y)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_annihilated_vectors_kill_psd_inputs(seed):
    g = np.random.default_rng(seed)
    alpha, _ = normalized(random_cp_map(g))
    K = annihilated_vectors(alpha)
    if K.dim:
        c = g.normal(size=(K.dim, K.dim)) + 1j * g.normal(size=(K.dim, K.dim))
        X = K.basis @ c @ c.conj().T @ K.basis.conj().T
        assert np.linalg.norm(alpha(X)) < 1e-8 * max(1.0, np.linalg.norm(X))
    # converse: α(xx^*) = 0 forces x into the annihilated subspace
    for x in np.eye(alpha.dim):
        if np.linalg.norm(alpha(np.outer(x, x))) < 1e-12:
            assert np.linalg.norm(x - K.projector @ x) < 1e-8
