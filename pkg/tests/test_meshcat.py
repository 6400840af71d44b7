import pytest
from hypothesis import given, strategies as st

from kronrho.archain import build_preproj
from kronrho.freegraded import recurrence_dims
from kronrho.meshcat import (MeshArrow, MeshVertex, STAR, STRAIGHT, compare_mesh_vs_modules,
                             enumerate_paths, incoming, mesh_compose, mesh_hom, mu, outgoing,
                             transfer_count, vertex_for_index)
from kronrho.exactla import rank

from conftest import FP, QQ


def test_vertex_validation():
    with pytest.raises(ValueError):
        MeshVertex(0, 2)


def test_arrow_endpoints():
    a = MeshArrow(STRAIGHT, 3, 1)
    assert (a.source, a.target) == (MeshVertex(3, 1), MeshVertex(3, 0))
    b = MeshArrow(STAR, 3, 2)
    assert (b.source, b.target) == (MeshVertex(3, 0), MeshVertex(4, 1))


def test_mu_lands_at_translate():
    for N in (2, 3):
        for v in (MeshVertex(2, 0), MeshVertex(2, 1)):
            for a in incoming(v, N):
                m = mu(a)
                assert m.source == v.translate(-1) and m.target == a.source


def test_path_examples():
    assert enumerate_paths(MeshVertex(0, 1), MeshVertex(0, 1), 2) == [()]
    assert len(enumerate_paths(MeshVertex(0, 1), MeshVertex(0, 0), 2)) == 2
    assert len(enumerate_paths(MeshVertex(0, 1), MeshVertex(1, 1), 2)) == 4
    assert enumerate_paths(MeshVertex(0, 1), MeshVertex(-1, 0), 2) == []


def test_mesh_hom_examples():
    assert mesh_hom(MeshVertex(0, 1), MeshVertex(1, 1), 2).dim == 3
    assert mesh_hom(MeshVertex(0, 1), MeshVertex(0, 0), 3).dim == 3
    assert mesh_hom(MeshVertex(0, 1), MeshVertex(-1, 0), 2).dim == 0


@pytest.mark.parametrize("N", [2, 3])
def test_mesh_dims_follow_recurrence(N):
    r = recurrence_dims(N, 6)
    s = MeshVertex(0, 1)
    for m in range(7):
        assert mesh_hom(s, vertex_for_index(m), N).dim == r[m]


@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(0, 1), st.integers(0, 1),
       st.integers(0, 3), st.sampled_from([2, 3]))
def test_translation_invariance_and_transfer_counts(m, k, x, y, gap, N):
    s, t = MeshVertex(m, x), MeshVertex(m + gap, y)
    s2, t2 = s.translate(k), t.translate(k)
    assert mesh_hom(s, t, N).dim == mesh_hom(s2, t2, N).dim
    assert len(enumerate_paths(s, t, N)) == transfer_count(s, t, N)


def test_outgoing_incoming_are_dual():
    N = 3
    for v in (MeshVertex(0, 0), MeshVertex(0, 1)):
        for a in outgoing(v, N):
            assert a in incoming(a.target, N)


def test_composition_with_identity():
    a, b = MeshVertex(0, 1), MeshVertex(1, 1)
    h = mesh_hom(a, b, 2, QQ)
    ident = mesh_hom(b, b, 2, QQ)
    assert rank(mesh_compose(ident, h), QQ) == h.dim
    with pytest.raises(ValueError):
        mesh_compose(h, h)


@pytest.mark.parametrize("N,window", [(2, 6), (3, 4)])
def test_mesh_matches_preprojective_component(N, window):
    chain = build_preproj(N, window, FP)
    checks = compare_mesh_vs_modules(N, window, chain)
    assert len(checks) == 2 and all(c.passed for c in checks)
    dims = checks[0].numbers["module_dims"]
    assert all(dims[f"{a}->{a}"] == 1 for a in range(window + 1))
    assert dims["0->1"] == N


def test_compare_rejects_short_chain():
    with pytest.raises(ValueError):
        compare_mesh_vs_modules(2, 5, build_preproj(2, 3, FP))
