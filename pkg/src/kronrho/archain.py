"""Preprojective and preinjective chains of the Kronecker quiver and the
checks built on them: the graded algebra of maps out of P1, purity of psi,
surjective evaluations between preinjectives, the torsion parts t_n and the
canonical sequence through P1 and S0.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import exactla as la
from .exactla import FieldSpec, Matrix, SparseVec
from .freegraded import GradedSlice, build_slices, index_word, recurrence_dims
from .kronrep import (KronRep, RepMorphism, cokernel_rep, direct_sum, hom_space,
                      is_isomorphic, kernel_rep, quotient_rep, standard_rep,
                      subrep_from_spans, sum_inclusion, sum_projection, tensor_by_space,
                      identity, zero_rep, morphism_coordinates, DENSE_LIMIT)
from .report import Check, check

DEFAULT_LENGTH = {2: 10, 3: 7, 4: 5}


def default_length(N: int) -> int:
    return DEFAULT_LENGTH.get(N, 4)


# ------------------------------------------------------------ preprojective

@dataclass
class PreprojChain:
    N: int
    length: int
    field: FieldSpec
    reps: List[KronRep]
    arrows: List[List[RepMorphism]]        # arrows[n][i]: Pi_n -> Pi_{n+1}
    psis: Dict[int, RepMorphism]            # psis[n]: Pi_{n-1} -> V (x) Pi_n

    def composite_f1(self, word: Sequence[int], start: int = 0) -> Matrix:
        """Vertex-1 matrix of x_{w_k} o ... o x_{w_1} starting at Pi_start."""
        F = self.field
        m = F.eye(self.reps[start].d1)
        for k, a in enumerate(word):
            m = F.matmul(self.arrows[start + k][a - 1].f1, m)
        return m

    def composite(self, word: Sequence[int], start: int = 0) -> RepMorphism:
        f = identity(self.reps[start])
        for k, a in enumerate(word):
            f = self.arrows[start + k][a - 1].compose(f)
        return f


def _psi(src: KronRep, arrows: Sequence[RepMorphism], VX: KronRep, summands) -> RepMorphism:
    """p -> sum_i e_i (x) x_i(p) into V (x) X."""
    f = None
    for i, x in enumerate(arrows):
        term = sum_inclusion(summands, i, VX).compose(x)
        f = term if f is None else f + term
    return RepMorphism(src, VX, f.f0, f.f1)


def build_preproj(N: int, length: int, field: FieldSpec = FieldSpec.prime()) -> PreprojChain:
    """Pi_0 = P1, Pi_1 = P0 and Pi_{n+1} = coker(psi_n: Pi_{n-1} -> V (x) Pi_n)."""
    if length < 1:
        raise ValueError("length must be at least 1")
    F = field
    P1, P0 = standard_rep("P1", N, F), standard_rep("P0", N, F)
    reps = [P1, P0]
    seed = []
    for i in range(N):
        f1 = F.zeros(N, 1)
        f1[i, 0] = F.scalar(1)
        seed.append(RepMorphism(P1, P0, F.zeros(1, 0), f1))
    arrows = [seed]
    psis: Dict[int, RepMorphism] = {}
    r = recurrence_dims(N, length + 1)
    for n in range(1, length):
        X = reps[n]
        summands = [X] * N
        VX = direct_sum(summands)
        psi = _psi(reps[n - 1], arrows[n - 1], VX, summands)
        if not psi.is_injective():
            raise AssertionError(f"psi_{n} is not injective")
        nxt, proj = cokernel_rep(psi)
        if (nxt.d0, nxt.d1) != (r[n], r[n + 1]):
            raise AssertionError(f"Pi_{n + 1} has dimension {nxt.dim}, expected {(r[n], r[n + 1])}")
        xs = [proj.compose(sum_inclusion(summands, i, VX)) for i in range(N)]
        # sum_i x_i o x_i = proj o psi = 0
        tot = xs[0].compose(arrows[n - 1][0])
        for i in range(1, N):
            tot = tot + xs[i].compose(arrows[n - 1][i])
        if not tot.is_zero():
            raise AssertionError("sum of squares of chain maps is nonzero")
        psis[n] = psi
        reps.append(nxt)
        arrows.append(xs)
    return PreprojChain(N, length, F, reps, arrows, psis)


def gamma_check(chain: PreprojChain, slices: Sequence[GradedSlice], cap: Optional[int] = None
                ) -> List[Check]:
    """Words X_{i1}..X_{in} -> x_{in} o ... o x_{i1} give R_n = Hom(Pi_0, Pi_n).

    The product on the Hom side is f . g = (g shifted to start at the target
    of f) o f, shifting a composite of chain maps by re-indexing its levels.
    """
    F = chain.field
    N = chain.N
    cap = chain.length if cap is None else cap
    if cap > chain.length or cap >= len(slices):
        raise ValueError("chain or slices too short for the requested degree")
    out = []
    # G[n]: columns = images of normal words, as vertex-1 vectors of Pi_n
    G: List[Matrix] = []
    for n in range(cap + 1):
        s = slices[n]
        hom = hom_space(chain.reps[0], chain.reps[n])
        cols = [chain.composite_f1(w)[:, 0] for w in s.normal_words]
        g = np.stack(cols, axis=1) if cols else F.zeros(chain.reps[n].d1, 0)
        G.append(g)
        rk = la.rank(g, F)
        # every word of degree n, not just normal ones, must map to the
        # image of its normal form (well defined on the quotient)
        allw = _all_word_images(chain, n)
        nf = F.zeros(s.dim, N ** n)
        for idx in range(N ** n):
            for k, v in s.coords(index_word(idx, n, N)).items():
                nf[k, idx] = v
        well_defined = F.equal(allw, F.matmul(g, nf))
        ok = len(hom) == s.dim and rk == s.dim and well_defined
        out.append(check(f"gamma N={N} degree {n}", "gamma-isomorphism", ok,
                         degree=n, hom_dim=len(hom), r_n=s.dim, rank=rk,
                         words_checked=N ** n, well_defined=well_defined))
    # structure constants: for normal u (deg m), v (deg k): shifted(v) o gamma(u)
    # equals gamma(normal form of uv)
    for n in range(cap + 1):
        mult_ok = True
        pairs = 0
        for m in range(n + 1):
            k = n - m
            su, sv, sn = slices[m], slices[k], slices[n]
            for v in sv.normal_words:
                shifted = chain.composite_f1(v, start=m)          # (Pi_n)_1 x (Pi_m)_1
                lhs = F.matmul(shifted, G[m])                      # columns: u over R_m basis
                coords = F.zeros(sn.dim, su.dim)
                for j, u in enumerate(su.normal_words):
                    for q, c in sn.coords(u + v).items():
                        coords[q, j] = c
                rhs = F.matmul(G[n], coords)
                pairs += su.dim
                if not F.equal(lhs, rhs):
                    mult_ok = False
        out.append(check(f"gamma N={N} products in degree {n}", "gamma-isomorphism", mult_ok,
                         degree=n, pairs=pairs))
    return out


def _all_word_images(chain: PreprojChain, n: int) -> Matrix:
    """Vertex-1 images of all N^n words, columns in word-index order."""
    F = chain.field
    cur = F.eye(1)
    for level in range(n):
        blocks = [F.matmul(chain.arrows[level][i].f1, cur) for i in range(chain.N)]
        # word index = previous index * N + (letter - 1)
        stacked = np.stack(blocks, axis=2)                  # d x prev x N
        cur = stacked.reshape(stacked.shape[0], -1)
    return cur


def purity_witnesses(chain: PreprojChain) -> List[Check]:
    """psi_n is injective and so is Hom(P1, psi_n), for every n in the chain."""
    F = chain.field
    P1 = chain.reps[0]
    out = []
    for n in sorted(chain.psis):
        psi = chain.psis[n]
        mod_inj = psi.is_injective()
        src_b = hom_space(P1, psi.src)
        tgt_b = hom_space(P1, psi.tgt)
        if src_b:
            imgs = np.stack([psi.compose(g).vector() for g in src_b], axis=1)
            B = np.stack([g.vector() for g in tgt_b], axis=1)
            coords = la.solve_matrix(B, imgs, F)
            hom_rank = la.rank(coords, F) if coords is not None else -1
        else:
            hom_rank = 0
        hom_inj = hom_rank == len(src_b)
        out.append(check(f"purity N={chain.N} n={n}", "purity", mod_inj and hom_inj,
                         n=n, psi_injective=mod_inj, hom_p1_psi_injective=hom_inj,
                         hom_source_dim=len(src_b), hom_target_dim=len(tgt_b)))
    return out


def reflection_check(chain: PreprojChain, n: int, seed: int = 0) -> Check:
    """reflection_minus(Pi_n) is isomorphic to Pi_{n+2}, with a witness."""
    from .kronrep import coxeter_apply, reflection_minus
    X = chain.reps[n]
    Y = chain.reps[n + 2]
    R = reflection_minus(X)
    dims_ok = R.dim == coxeter_apply(X.dim, chain.N) == Y.dim
    res = is_isomorphic(R, Y, seed=seed)
    witness_ok = res.isomorphic and res.witness.intertwines() and res.witness.is_invertible()
    return check(f"reflection N={chain.N} n={n}", "coxeter-reflection", dims_ok and witness_ok,
                 n=n, dim=[R.d0, R.d1], expected=[Y.d0, Y.d1], witness=witness_ok)


# ------------------------------------------------------------ preinjective

@dataclass
class PreinjChain:
    N: int
    length: int
    field: FieldSpec
    reps: List[KronRep]
    arrows: List[List[RepMorphism]]        # arrows[n][i]: Theta_{n+1} -> Theta_n

    def hom_from(self, n: int, M: KronRep) -> "PreinjHom":
        X = self.reps[n]
        basis = hom_space(X, M)
        return PreinjHom.from_basis(basis, M)

    def ext1_to(self, n: int, M: KronRep) -> int:
        from .kronrep import ext1_dim
        return ext1_dim(self.reps[n], M)


def build_preinj(N: int, length: int, field: FieldSpec = FieldSpec.prime()) -> PreinjChain:
    """Theta_0 = S0, Theta_1 = I1, Theta_{n+1} = ker(V (x) Theta_n -> Theta_{n-1})."""
    if length < 1:
        raise ValueError("length must be at least 1")
    F = field
    S0, I1 = standard_rep("S0", N, F), standard_rep("I1", N, F)
    reps = [S0, I1]
    seed = []
    for i in range(N):
        f0 = F.zeros(1, N)
        f0[0, i] = F.scalar(1)
        seed.append(RepMorphism(I1, S0, f0, F.zeros(0, 1)))
    arrows = [seed]
    r = recurrence_dims(N, length + 1)
    for n in range(1, length):
        X = reps[n]
        summands = [X] * N
        VX = direct_sum(summands)
        phi = None
        for i in range(N):
            term = arrows[n - 1][i].compose(sum_projection(summands, i, VX))
            phi = term if phi is None else phi + term
        phi = RepMorphism(VX, reps[n - 1], phi.f0, phi.f1)
        if not phi.is_surjective():
            raise AssertionError(f"V (x) Theta_{n} -> Theta_{n - 1} is not onto")
        K, inc = kernel_rep(phi)
        if (K.d0, K.d1) != (r[n + 1], r[n]):
            raise AssertionError(f"Theta_{n + 1} has dimension {K.dim}, expected {(r[n + 1], r[n])}")
        ys = [sum_projection(summands, i, VX).compose(inc) for i in range(N)]
        tot = arrows[n - 1][0].compose(ys[0])
        for i in range(1, N):
            tot = tot + arrows[n - 1][i].compose(ys[i])
        if not tot.is_zero():
            raise AssertionError("sum of squares of chain maps is nonzero")
        reps.append(K)
        arrows.append(ys)
    return PreinjChain(N, length, F, reps, arrows)


def check_lemma_surj(chain: PreinjChain, n: int) -> Check:
    """Hom(Theta_{n+1}, Theta_n) (x) Theta_{n+1} -> Theta_n is onto and Hom has dim N."""
    if n + 1 > chain.length:
        raise ValueError("chain too short")
    F = chain.field
    X, Y = chain.reps[n + 1], chain.reps[n]
    basis = hom_space(X, Y)
    if basis:
        e0 = np.concatenate([b.f0 for b in basis], axis=1)
        e1 = np.concatenate([b.f1 for b in basis], axis=1)
        r0, r1 = la.rank(e0, F), la.rank(e1, F)
    else:
        r0 = r1 = 0
    onto = r0 == Y.d0 and r1 == Y.d1
    return check(f"evaluation onto N={chain.N} n={n}", "preinjective-evaluation",
                 onto and len(basis) == chain.N,
                 n=n, hom_dim=len(basis), rank0=r0, rank1=r1, target=[Y.d0, Y.d1])


# ------------------------------------------------------ sparse ring model

@dataclass
class PreinjHom:
    """Hom(Theta_n, M) summarised by its dimension and evaluation image in M."""

    dim: int
    image0: Matrix          # column basis of the image at vertex 0
    image1: Matrix
    basis: Optional[List[RepMorphism]] = None

    @classmethod
    def from_basis(cls, basis: List[RepMorphism], M: KronRep) -> "PreinjHom":
        F = M.field
        if basis:
            e0 = np.concatenate([b.f0 for b in basis], axis=1)
            e1 = np.concatenate([b.f1 for b in basis], axis=1)
        else:
            e0, e1 = F.zeros(M.d0, 0), F.zeros(M.d1, 0)
        return cls(len(basis), la.column_basis(e0, F), la.column_basis(e1, F), basis)


class RingPreinj:
    """Theta_n modelled as (R_n*, R_{n-1}*, transposed left multiplications).

    A morphism Theta_n -> M is a tuple u_j in R_{n-1} (j over a basis of M1)
    and v_l in R_n (l over M0) with X_i u_j = sum_l phi_i[j, l] v_l. Solving
    for v through the stacked arrow matrix leaves a sparse linear system in u
    whose size grows like r_n but whose rows have a handful of entries.
    """

    def __init__(self, N: int, length: int, field: FieldSpec = FieldSpec.prime(),
                 slices: Optional[List[GradedSlice]] = None):
        self.N, self.length, self.field = N, length, field
        self.slices = slices if slices is not None and len(slices) > length else \
            build_slices(N, length, field)
        # lm[n][i][q]: coordinates in R_n of X_{i+1} times the q-th word of R_{n-1}
        self._lm: Dict[int, List[List[SparseVec]]] = {}
        self._memo: Dict[Tuple, tuple] = {}

    def left_mult(self, n: int) -> List[List[SparseVec]]:
        if n not in self._lm:
            s, t = self.slices[n - 1], self.slices[n]
            self._lm[n] = [[t.coords((i,) + w) for w in s.normal_words]
                           for i in range(1, self.N + 1)]
        return self._lm[n]

    def dims(self, n: int) -> Tuple[int, int]:
        return self.slices[n].dim, (self.slices[n - 1].dim if n >= 1 else 0)

    def rep(self, n: int) -> KronRep:
        """Dense representation, for cross-checks at small n."""
        F = self.field
        d0, d1 = self.dims(n)
        maps = []
        for i in range(self.N):
            m = F.zeros(d1, d0)
            if n >= 1:
                for q, col in enumerate(self.left_mult(n)[i]):
                    for k, v in col.items():
                        m[q, k] = v
            maps.append(m)
        return KronRep(self.N, d0, d1, maps, F)

    def _solve(self, n: int, M: KronRep):
        key = (n, M.dumps())
        if key not in self._memo:
            self._memo[key] = self._solve_uncached(n, M)
        return self._memo[key]

    def _solve_uncached(self, n: int, M: KronRep):
        F = self.field
        N = self.N
        e1 = M.d1
        r_n, r_p = self.dims(n)
        col = M.col_map()                                  # (N e1) x e0, row (i, j)
        ker_phi = la.kernel_matrix(col, F)                 # socle directions
        if n == 0:
            return [], ker_phi, None, col
        # left annihilator Q of col: rows q with q col = 0
        Q = la.kernel_matrix(col.T.copy(), F).T.copy() if N * e1 else F.zeros(0, 0)
        if F.p is not None:
            cols = self._lambda_columns_fp(n, Q, e1)
        else:
            cols = self._lambda_columns(n, Q, e1)
        # a rank-only pass is much cheaper; track combinations only if needed
        if la.sparse_rank(cols, F) == len(cols):
            kernel = []
        else:
            kernel = la.sparse_kernel(cols, F, len(cols))
        return kernel, ker_phi, Q, col

    def _coo(self, n: int):
        """Left multiplications R_{n-1} -> R_n as COO arrays, one triple per letter."""
        key = ("coo", n)
        if key not in self._memo:
            out = []
            for col_list in self.left_mult(n):
                rows, cols, vals = [], [], []
                for q, col in enumerate(col_list):
                    for k, v in col.items():
                        rows.append(k)
                        cols.append(q)
                        vals.append(int(v))
                out.append((np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64),
                            np.array(vals, dtype=np.int64)))
            self._memo[key] = out
        return self._memo[key]

    def _lambda_columns_fp(self, n: int, Q: Matrix, e1: int) -> List[SparseVec]:
        """Columns of u -> (sum_{i,j} Q[c,(i,j)] X_i u_j)_c over F_p, built vectorised."""
        p = self.field.p
        r_n, r_p = self.dims(n)
        R, C, V = [], [], []
        for i, (rows, cols, vals) in enumerate(self._coo(n)):
            for j in range(e1):
                for c in np.nonzero(Q[:, i * e1 + j])[0]:
                    R.append(c * r_n + rows)
                    C.append(j * r_p + cols)
                    V.append(vals * int(Q[c, i * e1 + j]) % p)
        ncols = e1 * r_p
        if not R:
            return [{} for _ in range(ncols)]
        R, C, V = np.concatenate(R), np.concatenate(C), np.concatenate(V)
        order = np.lexsort((R, C))
        R, C, V = R[order], C[order], V[order]
        # merge duplicate (column, row) pairs
        new = np.ones(len(R), dtype=bool)
        new[1:] = (R[1:] != R[:-1]) | (C[1:] != C[:-1])
        starts = np.nonzero(new)[0]
        V = np.add.reduceat(V, starts) % p
        R, C = R[starts], C[starts]
        keep = V != 0
        R, C, V = R[keep], C[keep], V[keep]
        bounds = np.searchsorted(C, np.arange(ncols + 1))
        Rl, Vl = R.tolist(), V.tolist()
        return [dict(zip(Rl[bounds[q]:bounds[q + 1]], Vl[bounds[q]:bounds[q + 1]]))
                for q in range(ncols)]

    def _lambda_columns(self, n: int, Q: Matrix, e1: int) -> List[SparseVec]:
        N = self.N
        r_n, r_p = self.dims(n)
        lm = self.left_mult(n)
        cols: List[SparseVec] = []
        for j in range(e1):
            for q in range(r_p):
                entry: SparseVec = {}
                for c in range(Q.shape[0]):
                    for i in range(N):
                        coef = Q[c, i * e1 + j]
                        if coef == 0:
                            continue
                        for k, v in lm[i][q].items():
                            key = c * r_n + k
                            nv = entry.get(key, 0) + coef * v
                            if nv == 0:
                                entry.pop(key, None)
                            else:
                                entry[key] = nv
                cols.append(entry)
        return cols

    def hom_dim(self, n: int, M: KronRep) -> int:
        kernel, ker_phi, _, _ = self._solve(n, M)
        return len(kernel) + self.dims(n)[0] * ker_phi.shape[1]

    def hom_from(self, n: int, M: KronRep) -> PreinjHom:
        F = self.field
        N = self.N
        kernel, ker_phi, Q, col = self._solve(n, M)
        r_n, r_p = self.dims(n)
        dim = len(kernel) + r_n * ker_phi.shape[1]
        e0, e1 = M.d0, M.d1
        img0 = [ker_phi] if r_n and ker_phi.shape[1] else []
        img1 = []
        if kernel:
            # generalised inverse of col on its image
            piv_cols = la.rref(col, F)[1] if col.size else []
            B = col[:, piv_cols]
            Linv = la.left_inverse(B, F) if piv_cols else F.zeros(0, N * e1)
            lm = self.left_mult(n)
            p = F.p
            vecs1 = []
            xu_cols = []
            for u in kernel:
                per_word: Dict[int, Matrix] = {}
                by_w: Dict[int, Dict[int, object]] = {}
                for key, c in u.items():
                    j, q = divmod(key, r_p)
                    by_w.setdefault(q, {})[j] = c
                    # X_i u_j contributes at (i, j) for each word k of R_n
                    for i in range(N):
                        for k, v in lm[i][q].items():
                            vec = per_word.get(k)
                            if vec is None:
                                vec = per_word[k] = F.zeros(N * e1)
                            vec[i * e1 + j] = (vec[i * e1 + j] + c * v) % p if p is not None \
                                else vec[i * e1 + j] + c * v
                for q, d in by_w.items():
                    v1 = F.zeros(e1)
                    for j, c in d.items():
                        v1[j] = c
                    vecs1.append(v1)
                xu_cols.extend(per_word.values())
            if vecs1:
                img1.append(np.stack(vecs1, axis=1))
            if xu_cols:
                T = np.stack(xu_cols, axis=1)
                coeff = F.matmul(Linv, T)
                v0 = F.zeros(e0, coeff.shape[1])
                v0[piv_cols, :] = coeff
                img0.append(v0)
        im0 = la.column_basis(np.concatenate(img0, axis=1), F) if img0 else F.zeros(e0, 0)
        im1 = la.column_basis(np.concatenate(img1, axis=1), F) if img1 else F.zeros(e1, 0)
        return PreinjHom(dim, im0, im1)

    def ext1_to(self, n: int, M: KronRep) -> int:
        """dim coker of Hom(P0^a + P1^b, M) -> Hom(P1^(N a), M), (a, b) = dim Theta_n.

        That map is the intertwining operator, so its cokernel dimension is
        its codomain dimension minus its rank, and its kernel is Hom(Theta_n, M).
        """
        a, b = self.dims(n)
        codomain = self.N * a * M.d1
        domain = a * M.d0 + b * M.d1
        return codomain - (domain - self.hom_dim(n, M))


# ----------------------------------------------------------------- torsion

@dataclass
class TorsionParts:
    n: int
    t: KronRep
    f: KronRep
    inclusion: RepMorphism
    projection: RepMorphism
    hom_dim: int
    exact: bool
    hom_to_free_part: int


def _preinj_source(chain, n: int, M: KronRep) -> PreinjHom:
    if isinstance(chain, PreinjChain) and n <= chain.length:
        X = chain.reps[n]
        if X.d0 * M.d0 + X.d1 * M.d1 <= DENSE_LIMIT or M.dim.total == 0:
            return chain.hom_from(n, M)
    if isinstance(chain, RingPreinj):
        return chain.hom_from(n, M)
    raise ValueError("chain cannot supply this Hom space; use a RingPreinj model")


def _hom_dim_from(chain, n: int, M: KronRep) -> int:
    if isinstance(chain, RingPreinj):
        return chain.hom_dim(n, M)
    return _preinj_source(chain, n, M).dim


def _ext1_from(chain, n: int, M: KronRep) -> int:
    return chain.ext1_to(n, M)


def torsion_decompose(M: KronRep, chain, n: int) -> TorsionParts:
    """t = image and f = cokernel of Hom(Theta_n, M) (x) Theta_n -> M."""
    if n > chain.length:
        raise ValueError("chain too short")
    h = _preinj_source(chain, n, M)
    t, inc = subrep_from_spans(M, h.image0, h.image1)
    f, proj = quotient_rep(M, h.image0, h.image1)
    comp = proj.compose(inc)
    exact = (inc.is_injective() and proj.is_surjective() and comp.is_zero()
             and t.d0 + f.d0 == M.d0 and t.d1 + f.d1 == M.d1)
    hf = _hom_dim_from(chain, n, f) if f.dim.total else 0
    return TorsionParts(n, t, f, inc, proj, h.dim, exact, hf)


@dataclass
class Stabilization:
    n0: Optional[int]
    t_dims: List[Tuple[int, int]]
    containment: bool
    M_prime: Optional[KronRep]
    M_second: Optional[KronRep]
    exact: bool
    ext_vanish: bool
    hom_vanish: bool
    ok: bool

    def to_numbers(self) -> Dict:
        return {"n0": self.n0, "t_dims": [list(d) for d in self.t_dims],
                "containment": self.containment, "exact": self.exact,
                "ext_vanish": self.ext_vanish, "hom_vanish": self.hom_vanish}


def torsion_stabilize(M: KronRep, chain, n_cap: int) -> Stabilization:
    """Least n0 with t_n(M) constant on [n0, n_cap]; then check the torsion pair.

    Stabilisation requires n0 < n_cap (a constant run of length at least two);
    otherwise the cap is exhausted and the result is a failure.
    """
    F = M.field
    if n_cap > chain.length:
        raise ValueError("chain shorter than the cap")
    spans = []
    for n in range(n_cap + 1):
        h = _preinj_source(chain, n, M)
        spans.append((h.image0, h.image1))
    dims = [(s[0].shape[1], s[1].shape[1]) for s in spans]
    containment = True
    for n in range(n_cap):
        a0, a1 = spans[n]
        b0, b1 = spans[n + 1]
        if a0.shape[1] and not la.in_column_space(b0, a0, F):
            containment = False
        if a1.shape[1] and not la.in_column_space(b1, a1, F):
            containment = False
    n0 = n_cap
    while n0 > 0 and dims[n0 - 1] == dims[n_cap]:
        n0 -= 1
    if n0 >= n_cap:
        return Stabilization(None, dims, containment, None, None, False, False, False, False)
    b0, b1 = spans[n_cap]
    Mp, inc = subrep_from_spans(M, b0, b1)
    Ms, proj = quotient_rep(M, b0, b1)
    exact = (inc.is_injective() and proj.is_surjective() and proj.compose(inc).is_zero()
             and Mp.d0 + Ms.d0 == M.d0 and Mp.d1 + Ms.d1 == M.d1)
    ext_ok = all(_ext1_from(chain, n, Mp) == 0 for n in range(n0 + 1, n_cap + 1))
    hom_ok = all(_hom_dim_from(chain, n, Ms) == 0 for n in range(n0 + 1, n_cap + 1))
    ok = containment and exact and ext_ok and hom_ok
    return Stabilization(n0, dims, containment, Mp, Ms, exact, ext_ok, hom_ok, ok)


# ----------------------------------------------------- canonical sequence

def canonical_sequence_check(M: KronRep, seed: int = 0) -> Check:
    """0 -> Hom(P1,M) (x) P1 -> M -> Hom(P0,M) (x) S0 -> 0, natural in M."""
    F, N = M.field, M.N
    P1, P0, S0 = standard_rep("P1", N, F), standard_rep("P0", N, F), standard_rep("S0", N, F)
    left = _evaluation(P1, M)
    inj = left.is_injective()
    C, proj = cokernel_rep(left)
    target = tensor_by_space(M.d0, S0)
    coker_iso = bool(is_isomorphic(C, target))
    right = _coevaluation_s0(M)
    exact_mid = right.compose(left).is_zero() and right.is_surjective() and \
        left.src.dim.total + right.tgt.dim.total == M.dim.total
    # naturality against a random morphism M -> M + P0
    rng = np.random.default_rng(seed)
    Mp = direct_sum([M, P0])
    hb = hom_space(M, Mp)
    natural = True
    if hb:
        cs = F.random_scalars(rng, len(hb))
        h = None
        for c, b in zip(cs, hb):
            t = b.scaled(c)
            h = t if h is None else h + t
        left_p = _evaluation(P1, Mp)
        right_p = _coevaluation_s0(Mp)
        induced_l = _induced_on_hom(P1, h, M, Mp)
        induced_r = _induced_on_hom(P0, h, M, Mp, factor=S0)
        sq1 = h.compose(left)
        sq1b = left_p.compose(induced_l)
        sq2 = right_p.compose(h)
        sq2b = induced_r.compose(right)
        natural = (F.equal(sq1.f0, sq1b.f0) and F.equal(sq1.f1, sq1b.f1)
                   and F.equal(sq2.f0, sq2b.f0) and F.equal(sq2.f1, sq2b.f1))
    ok = inj and coker_iso and exact_mid and natural
    return check(f"canonical sequence N={N} dim=({M.d0},{M.d1})", "canonical-sequence", ok,
                 dim=[M.d0, M.d1], left_injective=inj, cokernel_is_S0_power=coker_iso,
                 exact=exact_mid, natural=natural)


def _evaluation(P: KronRep, M: KronRep) -> RepMorphism:
    """Hom(P, M) (x) P -> M for a projective P."""
    basis = hom_space(P, M)
    F = M.field
    if not basis:
        return RepMorphism(zero_rep(M.N, F), M, F.zeros(M.d0, 0), F.zeros(M.d1, 0))
    src = tensor_by_space(len(basis), P)
    f0 = np.concatenate([b.f0 for b in basis], axis=1)
    f1 = np.concatenate([b.f1 for b in basis], axis=1)
    return RepMorphism(src, M, f0, f1)


def _coevaluation_s0(M: KronRep) -> RepMorphism:
    """M -> Hom(P0, M) (x) S0: coordinates of M0 in the images of the P0 generator."""
    F, N = M.field, M.N
    P0, S0 = standard_rep("P0", N, F), standard_rep("S0", N, F)
    basis = hom_space(P0, M)
    tgt = tensor_by_space(len(basis), S0) if basis else zero_rep(N, F)
    if not basis:
        return RepMorphism(M, tgt, F.zeros(0, M.d0), F.zeros(0, M.d1))
    gens = np.concatenate([b.f0 for b in basis], axis=1)   # d0 x h
    inv = la.inverse(gens, F)
    if inv is None:
        raise AssertionError("Hom(P0, M) does not match M0")
    return RepMorphism(M, tgt, inv, F.zeros(0, M.d1))


def _induced_on_hom(P: KronRep, h: RepMorphism, M: KronRep, Mp: KronRep,
                    factor: Optional[KronRep] = None) -> RepMorphism:
    """Hom(P, h) (x) factor between the tensored Hom spaces; factor defaults to P."""
    F = M.field
    factor = P if factor is None else factor
    b = hom_space(P, M)
    bp = hom_space(P, Mp)
    src = tensor_by_space(len(b), factor) if b else zero_rep(M.N, F)
    tgt = tensor_by_space(len(bp), factor) if bp else zero_rep(M.N, F)
    coords = F.zeros(len(bp), len(b))
    for j, g in enumerate(b):
        c = morphism_coordinates(bp, h.compose(g))
        if c is None:
            raise AssertionError("composite left the Hom space")
        coords[:, j] = c
    f0 = np.kron(coords, F.eye(factor.d0)) if factor.d0 else F.zeros(tgt.d0, src.d0)
    f1 = np.kron(coords, F.eye(factor.d1)) if factor.d1 else F.zeros(tgt.d1, src.d1)
    return RepMorphism(src, tgt, F.normalize(f0), F.normalize(f1))
