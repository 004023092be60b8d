import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hoqmc.gf_linalg import GFMatrix, IncrementalBasis, is_prime, mat_vec_mul, rank, rows_independent


def scalar_matvec(M, v, b):
    return [sum(M[i][k] * v[k] for k in range(len(v))) % b for i in range(len(M))]


def span_size(rows, b):
    """Number of distinct vectors in the span, by enumerating all coefficient tuples."""
    seen = set()
    for coeffs in itertools.product(range(b), repeat=len(rows)):
        seen.add(tuple(sum(c * r[i] for c, r in zip(coeffs, rows)) % b for i in range(len(rows[0]))))
    return len(seen)


@st.composite
def matrices(draw, max_dim=12):
    b = draw(st.sampled_from([2, 3, 5]))
    r = draw(st.integers(1, max_dim))
    c = draw(st.integers(1, max_dim))
    seed = draw(st.integers(0, 2**32 - 1))
    a = np.random.default_rng(seed).integers(0, b, size=(r, c))
    return GFMatrix(a, b)


def test_construction_checks():
    with pytest.raises(ValueError):
        GFMatrix([[1, 0]], 4)
    with pytest.raises(ValueError):
        GFMatrix([[2, 0]], 2)
    assert [p for p in range(20) if is_prime(p)] == [2, 3, 5, 7, 11, 13, 17, 19]


def test_mat_vec_identity_and_zero():
    assert list(mat_vec_mul(GFMatrix.identity(3, 2), [1, 0, 1])) == [1, 0, 1]
    assert list(mat_vec_mul(GFMatrix.zeros(4, 3, 5), [4, 2, 3])) == [0, 0, 0, 0]


def test_mat_vec_mod3_example():
    M = [[1, 2], [2, 2]]
    expected = scalar_matvec(M, [1, 1], 3)
    assert expected == [0, 1]
    assert list(mat_vec_mul(GFMatrix(M, 3), [1, 1])) == expected


def test_mat_vec_errors():
    with pytest.raises(ValueError):
        mat_vec_mul(GFMatrix.identity(3, 2), [1, 0])
    with pytest.raises(ValueError):
        mat_vec_mul(GFMatrix.identity(2, 3), [1, 3])


def test_rank_examples():
    assert rank(GFMatrix.identity(5, 7)) == 5
    assert rank(GFMatrix([[1, 0, 1], [1, 0, 1], [0, 1, 1]], 2)) < 3
    rows = [(1, 1, 0), (0, 1, 1), (1, 0, 1)]
    # span of size b^rank
    assert span_size(rows, 2) == 2 ** 2
    assert rank(GFMatrix(rows, 2)) == 2


def test_rows_independent_examples():
    assert rows_independent([], 2)
    assert not rows_independent([(1, 0, 1), (0, 0, 0)], 3)
    # three vectors in F_2^2 cannot be independent
    assert not rows_independent([(1, 0), (0, 1), (1, 1)], 2)
    assert rows_independent([(1, 0), (0, 1)], 2)
    with pytest.raises(ValueError):
        rows_independent([(1, 0), (1,)], 2)


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_transpose(M):
    assert rank(M) == rank(M.transpose())
    assert 0 <= rank(M) <= min(M.shape)


@settings(max_examples=40, deadline=None)
@given(matrices(max_dim=5))
def test_rank_matches_span_enumeration(M):
    if M.base ** M.rows > 4000:
        return
    rows = [tuple(int(x) for x in r) for r in M.array]
    assert M.base ** rank(M) == span_size(rows, M.base)


@settings(max_examples=60, deadline=None)
@given(matrices(max_dim=8), st.integers(0, 2**32 - 1))
def test_independence_inherited_by_subsets(M, seed):
    rows = [list(r) for r in M.array]
    if not rows_independent(rows, M.base):
        return
    rng = np.random.default_rng(seed)
    keep = [r for r in rows if rng.random() < 0.5]
    assert rows_independent(keep, M.base)


@settings(max_examples=60, deadline=None)
@given(matrices(), st.integers(0, 2**32 - 1))
def test_mat_vec_linear(M, seed):
    rng = np.random.default_rng(seed)
    v = rng.integers(0, M.base, M.cols)
    w = rng.integers(0, M.base, M.cols)
    lhs = mat_vec_mul(M, (v + w) % M.base)
    rhs = (mat_vec_mul(M, v) + mat_vec_mul(M, w)) % M.base
    assert np.array_equal(lhs, rhs)


@settings(max_examples=40, deadline=None)
@given(matrices(max_dim=8))
def test_incremental_basis_agrees_with_rank(M):
    basis = IncrementalBasis(M.cols, M.base)
    added = sum(basis.add(r) for r in M.array)
    assert added == rank(M)
