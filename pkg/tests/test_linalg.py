from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from stringhom.linalg import (DimensionError, InclusionError, SparseMatrix, SubspaceBasis, cohomology_rank,
                              in_span, quotient_rank, rank, rank_kernel_image, solve_in_span)

F = Fraction


def matrices(max_rows=6, max_cols=6):
    entry = st.one_of(st.just(0), st.just(0), st.integers(-3, 3), st.fractions(-4, 4, max_denominator=5))
    return st.integers(0, max_rows).flatmap(
        lambda r: st.integers(0, max_cols).flatmap(
            lambda c: st.lists(st.lists(entry, min_size=c, max_size=c), min_size=r, max_size=r).map(
                lambda rows: SparseMatrix(r, c, {(i, j): x for i, row in enumerate(rows) for j, x in enumerate(row)}))))


def test_identity():
    r, ker, img = rank_kernel_image(SparseMatrix.from_dense([[1, 0], [0, 1]]))
    assert (r, ker.dim, img.dim) == (2, 0, 2)


def test_zero_map():
    r, ker, _ = rank_kernel_image(SparseMatrix(3, 4, {}))
    assert (r, ker.dim) == (0, 4)


def test_proportional_rows():
    r, ker, _ = rank_kernel_image(SparseMatrix.from_dense([[1, 2], [2, 4]]))
    assert r == 1 and ker.dim == 1
    (v,) = ker.vectors
    # kernel spanned by (2, -1)
    assert v[0] * -1 == v[1] * 2


def test_empty_matrix():
    assert rank(SparseMatrix(0, 0, {})) == 0
    assert rank_kernel_image(SparseMatrix(0, 3, {}))[1].dim == 3


def test_zero_entries_are_dropped():
    m = SparseMatrix(2, 2, {(0, 0): 0, (1, 1): F(3, 6)})
    assert m.entries == {(1, 1): F(1, 2)}
    with pytest.raises(DimensionError):
        SparseMatrix(2, 2, {(2, 0): 1})


def test_in_span_examples():
    b = SubspaceBasis(3, ({0: F(1)}, {1: F(1), 2: F(1)}))
    assert in_span({}, b)
    assert in_span({0: F(1), 1: F(3), 2: F(3)}, b)
    assert not in_span({0: F(1)}, SubspaceBasis(2, ({1: F(1)},)))
    with pytest.raises(DimensionError):
        in_span({5: F(1)}, b)


def test_quotient_rank_examples():
    e = [{i: F(1)} for i in range(5)]
    assert quotient_rank(SubspaceBasis(5, tuple(e)), SubspaceBasis(5, (e[0], {1: F(2), 3: F(1)}))) == 3
    assert quotient_rank(SubspaceBasis(5, tuple(e[:2])), SubspaceBasis(5, tuple(e[:2]))) == 0
    assert quotient_rank(SubspaceBasis(5, tuple(e[:4])), SubspaceBasis(5, ())) == 4


def test_quotient_rank_inclusion_witness():
    with pytest.raises(InclusionError) as info:
        quotient_rank(SubspaceBasis(2, ({0: F(1)},)), SubspaceBasis(2, ({1: F(1)},)))
    assert info.value.witness == {1: F(1)}


def test_solve_in_span():
    vecs = [{0: F(1), 1: F(1)}, {1: F(2)}]
    assert solve_in_span({0: F(3), 1: F(7)}, vecs, 2) == [F(3), F(2)]
    assert solve_in_span({2: F(1)}, vecs, 3) is None


@given(matrices())
def test_rank_plus_nullity(m):
    r, ker, img = rank_kernel_image(m)
    assert r + ker.dim == m.cols
    assert img.dim == r


@given(matrices())
def test_rank_of_transpose(m):
    assert rank(m) == rank(m.transpose())


@given(matrices())
def test_kernel_is_killed(m):
    _, ker, _ = rank_kernel_image(m)
    for v in ker.vectors:
        assert not m.apply(v)


@given(matrices())
def test_elimination_is_deterministic(m):
    a = rank_kernel_image(m)
    b = rank_kernel_image(SparseMatrix(m.rows, m.cols, dict(reversed(list(m.entries.items())))))
    assert a[1].vectors == b[1].vectors and a[2].vectors == b[2].vectors


@given(matrices())
def test_dense_fallback_agrees(m):
    sparse = rank_kernel_image(m, dense_threshold=2.0)
    dense = rank_kernel_image(m, dense_threshold=0.0)
    assert sparse[0] == dense[0]
    assert all(not m.apply(v) for v in dense[1].vectors)


def test_cohomology_rank_of_composable_pair():
    # C^0 -> C^1 -> C^2 with d1 = (1, 1)^T and d2 = (1, -1): exact in the middle
    d1 = SparseMatrix.from_dense([[1], [1]])
    d2 = SparseMatrix.from_dense([[1, -1]])
    assert (d2 @ d1).is_zero()
    assert cohomology_rank(d1, d2, 2) == 0
    assert cohomology_rank(None, d1, 1) == 0
    assert cohomology_rank(d2, None, 1) == 0
