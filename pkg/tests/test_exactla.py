from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kronrho import exactla as la
from kronrho.exactla import FieldSpec, SparseEchelon

from conftest import FP, QQ, naive_rank, to_lists


def small_matrix(draw, field, max_rows=6, max_cols=6):
    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(0, max_cols))
    entries = draw(st.lists(st.integers(-3, 3), min_size=r * c, max_size=r * c))
    return field.array(entries, (r, c))


matrices = st.composite(lambda draw, field: small_matrix(draw, field))


def test_field_parsing():
    assert FieldSpec.from_string("q").is_rational
    assert FieldSpec.from_string("fp:7").p == 7
    assert FieldSpec.from_string("fp").p == la.DEFAULT_PRIME
    for bad in ("fp:4", "fp:2", "fp:x", "zz", f"fp:{(1 << 21) + 23}"):
        with pytest.raises(ValueError):
            FieldSpec.from_string(bad)


def test_scalar_format_roundtrip():
    assert QQ.fmt(Fraction(3, 2)) == "3/2"
    assert QQ.parse("3/2") == Fraction(3, 2)
    assert FP.fmt(FP.scalar(-1)) == 32002
    with pytest.raises(ValueError):
        FP.parse(1.5)


def test_rref_examples():
    red, piv, rk = la.rref(QQ.eye(2), QQ)
    assert (piv, rk) == ([0, 1], 2)
    red, piv, rk = la.rref(FP.zeros(3, 4), FP)
    assert (piv, rk) == ([], 0)


@pytest.mark.parametrize("fld", [QQ, FP], ids=["Q", "Fp"])
@given(data=st.data())
def test_rank_matches_naive_oracle(fld, data):
    m = data.draw(matrices(fld))
    want = naive_rank(to_lists(m), fld.p) if m.size else 0
    assert la.rank(m, fld) == want
    assert la.rref(m, fld)[2] == want


@pytest.mark.parametrize("fld", [QQ, FP], ids=["Q", "Fp"])
@given(data=st.data())
def test_kernel_and_rank_nullity(fld, data):
    m = data.draw(matrices(fld))
    k = la.kernel_matrix(m, fld)
    assert k.shape == (m.shape[1], m.shape[1] - la.rank(m, fld))
    assert fld.is_zero(fld.matmul(m, k))
    assert la.rank(k, fld) == k.shape[1]


@pytest.mark.parametrize("fld", [QQ, FP], ids=["Q", "Fp"])
@given(data=st.data())
def test_solve_consistent_systems(fld, data):
    m = data.draw(matrices(fld))
    x = fld.array(data.draw(st.lists(st.integers(-3, 3), min_size=m.shape[1],
                                     max_size=m.shape[1])), (m.shape[1], 1))
    b = fld.matmul(m, x)
    y = la.solve_matrix(m, b, fld)
    assert y is not None and fld.equal(fld.matmul(m, y), b)


def test_solve_inconsistent_and_bad_shape():
    m = QQ.array([1, 0, 0, 0], (2, 2))
    assert la.solve(m, QQ.array([0, 1]), QQ) is None
    with pytest.raises(ValueError):
        la.solve(m, QQ.array([1, 2, 3]), QQ)


@pytest.mark.parametrize("fld", [QQ, FP], ids=["Q", "Fp"])
def test_inverse(fld):
    rng = np.random.default_rng(1)
    for _ in range(20):
        m = fld.random_matrix(rng, 4, 4)
        inv = la.inverse(m, fld)
        if inv is None:
            assert la.rank(m, fld) < 4
        else:
            assert fld.equal(fld.matmul(m, inv), fld.eye(4))


@pytest.mark.parametrize("fld", [QQ, FP], ids=["Q", "Fp"])
@given(data=st.data())
def test_quotient_basis(fld, data):
    m = data.draw(matrices(fld))
    q = la.quotient_basis(m.shape[0], m, fld)
    assert q.dim == m.shape[0] - la.rank(m, fld) if m.shape[1] else q.dim == m.shape[0]
    assert fld.is_zero(q.project(m))
    # identity on the representatives
    for j, r in enumerate(q.representatives):
        e = fld.zeros(m.shape[0])
        e[r] = fld.scalar(1)
        v = q.project(e)
        assert v[j] == 1 and sum(1 for x in v if x != 0) == 1


@pytest.mark.parametrize("fld", [QQ, FP], ids=["Q", "Fp"])
@given(data=st.data())
def test_sparse_matches_dense(fld, data):
    m = data.draw(matrices(fld))
    rows = [la.dense_to_sparse(r) for r in m]
    assert la.sparse_rank(rows, fld) == la.rank(m, fld)
    cols = [la.dense_to_sparse(c) for c in m.T]
    ker = la.sparse_kernel(cols, fld, len(cols))
    assert len(ker) == m.shape[1] - la.rank(m, fld)
    for z in ker:
        v = la.sparse_to_dense(z, m.shape[1], fld)
        assert fld.is_zero(fld.matmul(m, v.reshape(-1, 1)))


def test_sparse_echelon_dependency_tag():
    e = SparseEchelon(QQ, track=True)
    assert e.insert({0: 1, 1: 1}, {0: 1}) is None
    assert e.insert({1: 2}, {1: 1}) is None
    tag = e.insert({0: 1, 1: 3}, {2: 1})
    assert tag is not None
    # tag says 1*row0 + 1*row1 - row2 = 0
    assert tag == {0: Fraction(-1), 1: Fraction(-1), 2: Fraction(1)} or \
        tag == {0: Fraction(1), 1: Fraction(1), 2: Fraction(-1)}


def test_matmul_exact_for_large_inner_dimension():
    rng = np.random.default_rng(0)
    a = rng.integers(0, FP.p, size=(3, 5000)).astype(np.int64)
    b = rng.integers(0, FP.p, size=(5000, 2)).astype(np.int64)
    want = [[sum(int(a[i, k]) * int(b[k, j]) for k in range(5000)) % FP.p for j in range(2)]
            for i in range(3)]
    assert FP.matmul(a, b).tolist() == want


def test_left_right_inverse_and_block_diag():
    m = QQ.array([1, 2, 0, 1, 1, 1], (2, 3))
    r = la.right_inverse(m, QQ)
    assert QQ.equal(QQ.matmul(m, r), QQ.eye(2))
    l = la.left_inverse(m.T.copy(), QQ)
    assert QQ.equal(QQ.matmul(l, m.T.copy()), QQ.eye(2))
    bd = la.block_diag([QQ.eye(1), m], QQ)
    assert bd.shape == (3, 4) and bd[0, 0] == 1 and bd[1, 1] == 1
