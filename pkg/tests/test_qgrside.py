import json

import pytest

from kronrho import qgrside as qg
from kronrho.archain import build_preproj
from kronrho.freegraded import build_slices, recurrence_dims

from conftest import FP, QQ


@pytest.fixture(scope="module")
def sl2():
    return build_slices(2, 10, FP)


@pytest.fixture(scope="module")
def sl3():
    return build_slices(3, 8, FP)


def test_module_R_dims(sl2, sl3):
    R = qg.module_R(3, 0, 0, 5, sl3)
    assert [R.dim(n) for n in range(6)] == recurrence_dims(3, 5)
    assert qg.module_R(3, 1, 0, 4, sl3).dim(0) == 3
    R1 = qg.module_R(2, 1, -1, 4, sl2)
    assert R1.dim(-1) == 1 and R1.dim(3) == sl2[4].dim
    Rm = qg.module_R(2, -2, 0, 4, sl2)
    assert Rm.dim(0) == Rm.dim(1) == 0 and Rm.dim(2) == 1


def test_relation_invariant_is_enforced(sl2):
    R = qg.module_R(2, 0, 0, 3, sl2)
    bad = {n: [m.copy() for m in ms] for n, ms in R.raise_maps.items()}
    bad[1][0] = bad[1][1]
    with pytest.raises(ValueError):
        qg.TruncGradedModule(2, FP, 0, 3, R.dims, bad)


def test_module_json_roundtrip(sl2):
    R = qg.module_R(2, 1, 0, 4, sl2)
    again = qg.TruncGradedModule.from_json(json.loads(R.dumps()), FP)
    assert again.dumps() == R.dumps()


@pytest.mark.parametrize("N", [2, 3])
def test_graded_hom_examples(N, sl2, sl3):
    sl = sl2 if N == 2 else sl3
    R = qg.module_R(N, 0, 0, 5, sl)
    R1 = qg.module_R(N, 1, 0, 5, sl)
    assert qg.graded_hom(R, R, 0, 0).dim == 1
    assert qg.graded_hom(R, R1, 0, 0).dim == N
    assert qg.graded_hom(R1, R, 0, 0).dim == 0
    assert qg.graded_hom(R, R, 1, 0).dim == N


def test_graded_hom_range_errors(sl2):
    R = qg.module_R(2, 0, 0, 4, sl2)
    with pytest.raises(ValueError):
        qg.graded_hom(R, R, 0, 6)
    with pytest.raises(ValueError):
        qg.graded_hom(R, R, 0, -1)


def test_graded_hom_families_intertwine(sl2):
    src = qg.direct_sum_graded([qg.module_R(2, 0, 0, 5, sl2), qg.module_R(2, 1, 0, 5, sl2)])
    space = qg.graded_hom(src, src, 0, 0)
    assert space.verify()
    # End(R + R(1)) over the tail from 0: 1 + N + 0 + 1
    assert space.dim == 4


@pytest.mark.parametrize("N", [2, 3])
def test_qgr_hom_dims(N):
    r = recurrence_dims(N, 4)
    for d in range(0, 5):
        h = qg.qgr_R_hom(N, d)
        assert h.stabilized and h.value == r[d]
    h = qg.qgr_R_hom(N, -1)
    assert h.stabilized and h.value == 0 and set(h.dims.values()) == {0}


def test_qgr_hom_reports_every_tail(sl2):
    R = qg.module_R(2, 0, 0, 6, sl2)
    h = qg.qgr_hom_dim(R, R, 0, range(0, 6), window=3)
    assert h.to_numbers()["dims_per_tail"] == [1] * 6 and h.value == 1
    short = qg.qgr_hom_dim(R, R, 0, range(0, 2), window=3)
    assert not short.stabilized and short.value is None


@pytest.mark.parametrize("N", [2, 3])
def test_tilting(N):
    checks = qg.tilting_check(N)
    assert all(c.passed for c in checks)
    assert checks[0].numbers["dims"] == [1, N, 0, 1]


@pytest.mark.parametrize("N,cap", [(2, 6), (3, 4)])
def test_gamma_star_of_projectives(N, cap):
    chain = build_preproj(N, cap + 1, FP)
    sl = build_slices(N, cap + 2, FP)
    G1 = qg.gamma_star_projective("P1", chain, cap)
    assert G1.dim(0) == 1
    assert [G1.dim(n) for n in range(cap + 1)] == recurrence_dims(N, cap)
    assert qg.gamma_star_check("P1", chain, cap, sl).passed
    assert qg.gamma_star_check("P0", chain, cap, sl).passed


def test_gamma_star_rejects_bad_input():
    chain = build_preproj(2, 3, FP)
    with pytest.raises(ValueError):
        qg.gamma_star_projective("S0", chain, 2)
    with pytest.raises(ValueError):
        qg.gamma_star_projective("P0", chain, 3)


def test_graded_isomorphism_detects_mismatch(sl2):
    R = qg.module_R(2, 0, 0, 4, sl2)
    R1 = qg.module_R(2, 1, 0, 4, sl2)
    assert qg.graded_isomorphism(R, R1)[0] is None
    fam, dim = qg.graded_isomorphism(R, R)
    assert fam is not None and dim == 1


def test_covers(sl2):
    R1 = qg.module_R(2, 1, -1, 5, sl2)
    c = qg.cover_by_shifts(R1, 4, sl2)
    assert c.ok and c.degrees == [-1]
    both = qg.direct_sum_graded([qg.module_R(2, 1, -1, 5, sl2), qg.module_R(2, 0, -1, 5, sl2)])
    c = qg.cover_by_shifts(both, 4, sl2)
    assert c.ok and c.degrees == [-1, 0] and c.count == 2
    chain = build_preproj(2, 7, FP)
    G0 = qg.gamma_star_projective("P0", chain, 5, lo=-1)
    c = qg.cover_by_shifts(G0, 4, sl2)
    assert c.ok and c.degrees == [-1]


def test_cover_budget_exhaustion(sl2):
    both = qg.direct_sum_graded([qg.module_R(2, 1, -1, 5, sl2), qg.module_R(2, 0, -1, 5, sl2)])
    assert not qg.cover_by_shifts(both, 1, sl2).ok


def test_rationals_small():
    sl = build_slices(2, 5, QQ)
    R = qg.module_R(2, 0, 0, 4, sl)
    assert qg.graded_hom(R, qg.module_R(2, 1, 0, 4, sl), 0, 0).dim == 2
