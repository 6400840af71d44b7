import numpy as np
import pytest
from hypothesis import given, strategies as st

from kronrho.kronrep import (DimVector, KronRep, RepMorphism, coxeter_apply, direct_sum,
                             euler_form, ext1_dim, hom_dim, hom_space, identity, is_isomorphic,
                             kernel_rep, cokernel_rep, morphism_coordinates, random_rep,
                             reflection_minus, standard_rep, sum_inclusion, sum_projection)

from conftest import FP, QQ, naive_rank


def naive_hom_dim(M, Np):
    """Unknowns f0 (e0 x d0), f1 (e1 x d1); equations f1 phi_i - psi_i f0 = 0."""
    p = M.field.p
    d0, d1, e0, e1 = M.d0, M.d1, Np.d0, Np.d1
    n_f0 = e0 * d0
    unknowns = n_f0 + e1 * d1
    rows = []
    for phi, psi in zip(M.maps, Np.maps):
        for r in range(e1):
            for c in range(d0):
                row = [0] * unknowns
                for k in range(d1):
                    row[n_f0 + r * d1 + k] += phi[k, c]
                for k in range(e0):
                    row[k * d0 + c] -= psi[r, k]
                rows.append(row)
    return unknowns - (naive_rank(rows, p) if rows else 0)


dims = st.tuples(st.integers(0, 4), st.integers(0, 4))


@pytest.mark.parametrize("N", [2, 3])
def test_standard_hom_dims(N):
    P0, P1, S0, I1 = (standard_rep(x, N, FP) for x in ("P0", "P1", "S0", "I1"))
    assert hom_dim(P1, P0) == N
    assert hom_dim(P0, P1) == 0
    assert hom_dim(P0, S0) == 1
    assert hom_dim(S0, P0) == 0
    assert hom_dim(P1, I1) == 1
    assert hom_dim(P0, I1) == N
    assert ext1_dim(S0, P1) == N
    assert ext1_dim(P1, S0) == 0
    assert ext1_dim(P0, P1) == 0


@given(dims, dims, st.integers(0, 2**32 - 1), st.sampled_from([2, 3]))
def test_hom_against_naive_linear_system(d, e, seed, N):
    rng = np.random.default_rng(seed)
    M, Np = random_rep(N, *d, FP, rng), random_rep(N, *e, FP, rng)
    assert hom_dim(M, Np) == naive_hom_dim(M, Np)


@given(dims, dims, st.integers(0, 2**32 - 1))
def test_hom_basis_members_intertwine(d, e, seed):
    rng = np.random.default_rng(seed)
    M, Np = random_rep(3, *d, QQ, rng), random_rep(3, *e, QQ, rng)
    basis = hom_space(M, Np)
    assert all(f.intertwines() for f in basis)
    if basis:
        V = np.stack([f.vector() for f in basis], axis=1)
        assert naive_rank(V.T.tolist()) == len(basis)


@given(dims, dims, st.integers(0, 2**32 - 1), st.sampled_from([2, 3]))
def test_euler_identity(d, e, seed, N):
    rng = np.random.default_rng(seed)
    M, Np = random_rep(N, *d, FP, rng), random_rep(N, *e, FP, rng)
    assert hom_dim(M, Np) - ext1_dim(M, Np) == euler_form(M.dim, Np.dim, N)


def test_euler_form_values():
    assert euler_form(DimVector(1, 0), DimVector(0, 1), 3) == -3
    assert euler_form(DimVector(1, 3), DimVector(1, 3), 3) == 1
    assert coxeter_apply(DimVector(0, 1), 2) == DimVector(2, 3)


@pytest.mark.parametrize("N", [2, 3])
def test_reflection_moves_along_preprojectives(N):
    P1, P0 = standard_rep("P1", N, FP), standard_rep("P0", N, FP)
    A = reflection_minus(P1)
    assert tuple(A.dim) == (N, N * N - 1)
    B = reflection_minus(P0)
    assert tuple(B.dim) == (N * N - 1, N ** 3 - 2 * N)
    assert hom_dim(A, A) == 1


def test_json_roundtrip(field):
    rng = np.random.default_rng(5)
    M = random_rep(3, 2, 3, field, rng)
    again = KronRep.loads(M.dumps(), field)
    assert again.same_as(M)


@pytest.mark.parametrize("bad", ['{"n": 2, "d0": 1, "d1": 1, "maps": [[1]]}',
                                 '{"n": 2, "d0": 1, "d1": 1, "maps": [[1], [1, 2]]}',
                                 '{"n": 2, "d0": 1}'])
def test_json_rejects_malformed(bad):
    with pytest.raises(ValueError):
        KronRep.loads(bad, FP)


def test_shape_validation():
    with pytest.raises(ValueError):
        KronRep(2, 1, 2, [FP.zeros(1, 2), FP.zeros(1, 2)], FP)
    M = standard_rep("P0", 2, FP)
    with pytest.raises(ValueError):
        RepMorphism(M, M, FP.eye(1), FP.zeros(2, 2))


def test_is_isomorphic_with_change_of_basis():
    rng = np.random.default_rng(1)
    M = random_rep(3, 2, 3, FP, rng)
    g0, g1 = FP.random_matrix(rng, 2, 2), FP.random_matrix(rng, 3, 3)
    from kronrho import exactla as la
    assert la.is_invertible(g0, FP) and la.is_invertible(g1, FP)
    Np = KronRep(3, 2, 3, [FP.matmul(FP.matmul(g1, m), la.inverse(g0, FP)) for m in M.maps], FP)
    res = is_isomorphic(M, Np)
    assert res and res.witness.is_invertible()
    assert not is_isomorphic(M, random_rep(3, 2, 4, FP, rng))
    P0 = standard_rep("P0", 3, FP)
    split = KronRep(3, 2, 6, [FP.zeros(6, 2)] * 3, FP)
    assert not is_isomorphic(direct_sum([P0, P0]), split)


def test_direct_sum_inclusions():
    reps = [standard_rep("P0", 2, FP), standard_rep("S0", 2, FP)]
    total = direct_sum(reps)
    for k in range(2):
        i, p = sum_inclusion(reps, k, total), sum_projection(reps, k, total)
        assert i.intertwines() and p.intertwines()
        assert p.compose(i).vector().tolist() == identity(reps[k]).vector().tolist()


def test_kernel_and_cokernel_of_evaluation():
    N = 3
    P0, S0 = standard_rep("P0", N, FP), standard_rep("S0", N, FP)
    f = hom_space(P0, S0)[0]
    K, inc = kernel_rep(f)
    assert tuple(K.dim) == (0, N) and inc.is_injective()
    C, proj = cokernel_rep(hom_space(standard_rep("P1", N, FP), P0)[0])
    assert tuple(C.dim) == (1, N - 1) and proj.is_surjective()


def test_morphism_coordinates():
    P1, P0 = standard_rep("P1", 3, FP), standard_rep("P0", 3, FP)
    basis = hom_space(P1, P0)
    f = basis[0].scaled(3) + basis[-1]
    c = morphism_coordinates(basis, f)
    assert c.tolist() == [3, 0, 1]
    assert morphism_coordinates(hom_space(P1, P1), identity(P1)) is not None
