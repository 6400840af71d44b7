import itertools

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from kronrho import freegraded as fg
from kronrho.freegraded import NCPoly, NCPolySyntaxError, parse_ncpoly, format_ncpoly

from conftest import FP, QQ, hilbert_series

# frozen from the series 1/(1 - N t + t^2) and cross-checked by sympy ranks below
HILBERT = {
    2: [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13],
    3: [1, 3, 8, 21, 55, 144, 377, 987, 2584],
    4: [1, 4, 15, 56, 209, 780, 2911],
}


def sympy_quotient_dim(N, n):
    words = list(itertools.product(range(1, N + 1), repeat=n))
    idx = {w: i for i, w in enumerate(words)}
    rows = []
    for k in range(n - 1):
        for pre in itertools.product(range(1, N + 1), repeat=k):
            for suf in itertools.product(range(1, N + 1), repeat=n - 2 - k):
                r = [0] * len(words)
                for i in range(1, N + 1):
                    r[idx[pre + (i, i) + suf]] += 1
                rows.append(r)
    return N ** n - (sympy.Matrix(rows).rank() if rows else 0)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_frozen_values_agree_with_series(N):
    assert HILBERT[N] == hilbert_series(N, len(HILBERT[N]) - 1)
    assert fg.recurrence_dims(N, len(HILBERT[N]) - 1) == HILBERT[N]


@pytest.mark.parametrize("N,n_max", [(2, 6), (3, 5), (4, 4)])
def test_sympy_oracle_small_degrees(N, n_max):
    assert [sympy_quotient_dim(N, n) for n in range(n_max + 1)] == HILBERT[N][:n_max + 1]


@pytest.mark.parametrize("N", [2, 3, 4])
def test_hilbert_by_elimination(N):
    assert fg.hilbert(N, len(HILBERT[N]) - 1, FP) == HILBERT[N]


@pytest.mark.parametrize("N,n", [(2, 5), (3, 4)])
def test_hilbert_over_rationals(N, n):
    assert fg.hilbert(N, n, QQ) == HILBERT[N][:n + 1]


@pytest.mark.parametrize("N,n_max", [(2, 8), (3, 6), (4, 5)])
def test_incremental_equals_direct(N, n_max):
    direct = fg.build_slices(N, n_max, FP, method="direct")
    inc = fg.build_slices(N, n_max, FP, method="incremental")
    for a, b in zip(direct, inc):
        assert a.normal_words == b.normal_words
    rng = np.random.default_rng(0)
    for _ in range(30):
        w = tuple(int(x) for x in rng.integers(1, N + 1, size=n_max))
        assert direct[n_max].coords(w) == inc[n_max].coords(w)


def test_ideal_component_count_and_content():
    for N, n in [(2, 3), (3, 4)]:
        gens = fg.ideal_component(N, n)
        assert len(gens) == (n - 1) * N ** (n - 2)
        assert all(g.degree == n for g in gens)
    with pytest.raises(ValueError):
        fg.ideal_component(3, 1)


def test_relation_is_zero_in_R():
    slices = fg.build_slices(3, 4, QQ)
    rel = NCPoly.relation(3)
    assert not np.any(fg.normal_form(rel, slices))
    # X1 (sum Xi^2) X2 also vanishes
    p = NCPoly.word([1], 3) * rel * NCPoly.word([2], 3)
    assert not np.any(fg.normal_form(p, slices))
    assert np.any(fg.normal_form(NCPoly.word([1, 1], 3), slices))


def test_normal_words_avoid_top_square():
    # under deglex with X_N largest, leading words of relations contain X_N X_N
    for s in fg.build_slices(3, 5, FP):
        assert all((3, 3) not in zip(w, w[1:]) for w in s.normal_words)


def test_parse_and_format():
    p = parse_ncpoly("X1*X2 - 3*X2^2", 2)
    assert p.terms == {(1, 2): 1, (2, 2): -3}
    assert parse_ncpoly("X1^2+X2^2", 2) == NCPoly.relation(2)
    text = "-4 - X1*X3 + 2*X3*X1 + 3/2*X2^2*X1"
    assert format_ncpoly(parse_ncpoly(text, 3)) == text


@pytest.mark.parametrize("text,pos", [("X1*", 3), ("X4", 0), ("2**X1", 2), ("X1 + + X2", 5)])
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(NCPolySyntaxError) as exc:
        parse_ncpoly(text, 3)
    assert exc.value.position == pos


word_terms = st.dictionaries(
    st.lists(st.integers(1, 3), min_size=0, max_size=4).map(tuple),
    st.fractions(min_value=-5, max_value=5, max_denominator=4), max_size=5)


@given(word_terms)
def test_format_parse_roundtrip(terms):
    p = NCPoly(3, terms)
    assert parse_ncpoly(format_ncpoly(p), 3) == p


@given(word_terms, word_terms, word_terms)
def test_free_algebra_ring_axioms(a, b, c):
    A, B, C = NCPoly(3, a), NCPoly(3, b), NCPoly(3, c)
    assert (A * B) * C == A * (B * C)
    assert A * (B + C) == A * B + A * C
    assert (A - A).is_zero()


@pytest.fixture(scope="module")
def slices3():
    return fg.build_slices(3, 6, FP)


@given(st.data())
def test_multiplication_associative(slices3, data):
    degs = [data.draw(st.integers(0, 2)) for _ in range(3)]
    vecs = [FP.array(data.draw(st.lists(st.integers(-4, 4), min_size=slices3[d].dim,
                                        max_size=slices3[d].dim))) for d in degs]
    a, b, c = vecs
    left = fg.multiply(fg.multiply(a, b, slices3), c, slices3)
    right = fg.multiply(a, fg.multiply(b, c, slices3), slices3)
    assert FP.equal(left, right)


def test_multiplication_agrees_with_free_product(slices3):
    rng = np.random.default_rng(3)
    for _ in range(10):
        u = NCPoly(3, {tuple(int(x) for x in rng.integers(1, 4, size=2)): 1}, FP)
        v = NCPoly(3, {tuple(int(x) for x in rng.integers(1, 4, size=3)): 2}, FP)
        prod = fg.normal_form(u * v, slices3)
        assert FP.equal(fg.multiply(fg.normal_form(u, slices3), fg.normal_form(v, slices3),
                                    slices3), prod)


@pytest.mark.parametrize("N,n_max", [(2, 8), (3, 6)])
def test_exact_sequence_checks_pass(N, n_max):
    slices = fg.build_slices(N, n_max, FP)
    for n in range(1, n_max):
        assert fg.check_lemma_exact_sequence(N, n, slices).passed


def test_word_index_is_deglex():
    words = [fg.index_word(i, 3, 2) for i in range(8)]
    assert words == sorted(words)
    assert all(fg.word_index(w, 2) == i for i, w in enumerate(words))
