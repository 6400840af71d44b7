"""Truncated graded right R-modules, graded Homs between them, and Hom in
qgr R modelled as the stable value of Homs out of tails.
"""

import json
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import exactla as la
from .exactla import FieldSpec, Matrix, SparseVec
from .freegraded import GradedSlice, build_slices
from .kronrep import hom_space
from .report import Check, check

DEFAULT_HI = {2: 8, 3: 6, 4: 5}
DEFAULT_WINDOW = 3


def default_hi(N: int) -> int:
    return DEFAULT_HI.get(N, 5)


@dataclass
class TruncGradedModule:
    """Components in degrees lo..hi and right multiplications raise[n][i]: M_n -> M_{n+1}."""

    N: int
    field: FieldSpec
    lo: int
    hi: int
    dims: Dict[int, int]
    raise_maps: Dict[int, List[Matrix]]

    def __post_init__(self):
        if self.hi < self.lo:
            raise ValueError("empty degree range")
        F = self.field
        for n in range(self.lo, self.hi):
            ms = self.raise_maps.get(n)
            if ms is None or len(ms) != self.N:
                raise ValueError(f"missing raise maps in degree {n}")
            for m in ms:
                if m.shape != (self.dims[n + 1], self.dims[n]):
                    raise ValueError(f"raise map in degree {n} has shape {m.shape}")
        for n in range(self.lo, self.hi - 1):
            tot = F.zeros(self.dims[n + 2], self.dims[n])
            for i in range(self.N):
                tot = F.add(tot, F.matmul(self.raise_maps[n + 1][i], self.raise_maps[n][i]))
            if not F.is_zero(tot):
                raise ValueError(f"sum of squares acts nonzero from degree {n}")

    def dim(self, n: int) -> int:
        return self.dims.get(n, 0)

    def row_map(self, n: int) -> Matrix:
        """[rho_1 | ... | rho_N]: M_n^N -> M_{n+1}."""
        return np.concatenate(self.raise_maps[n], axis=1)

    def to_json(self) -> Dict:
        f = self.field
        return {"n": self.N, "lo": self.lo, "hi": self.hi,
                "dims": [self.dims[n] for n in range(self.lo, self.hi + 1)],
                "raise": {str(n): [[f.fmt(x) for x in m.reshape(-1)] for m in self.raise_maps[n]]
                          for n in range(self.lo, self.hi)}}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def from_json(cls, data: Dict, field: FieldSpec) -> "TruncGradedModule":
        N, lo, hi = int(data["n"]), int(data["lo"]), int(data["hi"])
        dims = {lo + k: int(d) for k, d in enumerate(data["dims"])}
        if len(dims) != hi - lo + 1:
            raise ValueError("dims list does not match the degree range")
        raise_maps = {}
        for n in range(lo, hi):
            entries = data["raise"][str(n)]
            raise_maps[n] = [field.array([field.parse(x) for x in e], (dims[n + 1], dims[n]))
                             for e in entries]
        return cls(N, field, lo, hi, dims, raise_maps)


def right_mult(slices: Sequence[GradedSlice], n: int, i: int) -> Matrix:
    """Matrix of w -> w X_i from R_n to R_{n+1}."""
    s, t = slices[n], slices[n + 1]
    F = s.field
    m = F.zeros(t.dim, s.dim)
    for q, w in enumerate(s.normal_words):
        for k, v in t.coords(w + (i,)).items():
            m[k, q] = v
    return m


def module_R(N: int, d: int, lo: int, hi: int, slices: Sequence[GradedSlice]) -> TruncGradedModule:
    """R(d) truncated to degrees lo..hi: (R(d))_n = R_{n+d}."""
    if len(slices) <= hi + d:
        raise ValueError(f"slices needed up to degree {hi + d}")
    F = slices[0].field
    dims = {n: (slices[n + d].dim if n + d >= 0 else 0) for n in range(lo, hi + 1)}
    raise_maps = {}
    for n in range(lo, hi):
        if n + d >= 0:
            raise_maps[n] = [right_mult(slices, n + d, i) for i in range(1, N + 1)]
        else:
            raise_maps[n] = [F.zeros(dims[n + 1], 0) for _ in range(N)]
    return TruncGradedModule(N, F, lo, hi, dims, raise_maps)


def direct_sum_graded(mods: Sequence[TruncGradedModule]) -> TruncGradedModule:
    first = mods[0]
    F, N, lo, hi = first.field, first.N, first.lo, first.hi
    if any((m.lo, m.hi, m.N) != (lo, hi, N) for m in mods):
        raise ValueError("summands must share N and degree range")
    dims = {n: sum(m.dims[n] for m in mods) for n in range(lo, hi + 1)}
    raise_maps = {n: [la.block_diag([m.raise_maps[n][i] for m in mods], F) for i in range(N)]
                  for n in range(lo, hi)}
    return TruncGradedModule(N, F, lo, hi, dims, raise_maps)


# ------------------------------------------------------------ graded Hom

Family = Dict[int, Matrix]


@dataclass
class GradedHomSpace:
    source: TruncGradedModule
    target: TruncGradedModule
    d: int
    start: int
    top: int
    basis: List[Family]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def verify(self) -> bool:
        return all(intertwines(self.source, self.target, self.d, f, self.start, self.top)
                   for f in self.basis)


def intertwines(src: TruncGradedModule, tgt: TruncGradedModule, d: int, fam: Family,
                start: int, top: int) -> bool:
    F = src.field
    for m in range(start, top):
        for i in range(src.N):
            lhs = F.matmul(fam[m + 1], src.raise_maps[m][i])
            rhs = F.matmul(tgt.raise_maps[m + d][i], fam[m])
            if not F.equal(lhs, rhs):
                return False
    return True


def graded_hom(src: TruncGradedModule, tgt: TruncGradedModule, d: int, start: int
               ) -> GradedHomSpace:
    """Families f_m: src_m -> tgt_{m+d}, m = start..top, commuting with every X_i.

    The intertwining system is block bidiagonal in m, so its kernel is found
    degree by degree: the solutions on degrees start..m are extended to m+1
    by solving the equations linking m and m+1. When src_m generates src_{m+1}
    the new component is forced and only the consistency condition remains.
    Every returned family is checked against the full system.
    """
    if src.N != tgt.N or src.field != tgt.field:
        raise ValueError("modules over different algebras")
    top = min(src.hi, tgt.hi - d)
    if start < src.lo or start + d < tgt.lo or start > top:
        raise ValueError("insufficient overlap of degree ranges")
    # None means: every matrix at degree `start` is still allowed
    families: Optional[List[Family]] = None
    for m in range(start, top):
        families = _extend(src, tgt, d, m, families)
    if families is None:
        families = _elementary(src, tgt, d, start)
    space = GradedHomSpace(src, tgt, d, start, top, families)
    if not space.verify():
        raise AssertionError("graded Hom family fails the intertwining check")
    return space


def _elementary(src, tgt, d, m) -> List[Family]:
    F = src.field
    rows, cols = tgt.dim(m + d), src.dim(m)
    out = []
    for a in range(rows):
        for b in range(cols):
            e = F.zeros(rows, cols)
            e[a, b] = F.scalar(1)
            out.append({m: e})
    return out


def _extend(src, tgt, d, m, families: Optional[List[Family]]) -> List[Family]:
    F, N = src.field, src.N
    S_m, S_n = src.dim(m), src.dim(m + 1)
    T_m, T_n = tgt.dim(m + d), tgt.dim(m + d + 1)
    R = src.row_map(m) if S_m else F.zeros(S_n, 0)
    rk = la.rank(R, F) if R.size else 0
    if rk == S_n:
        K = la.kernel_matrix(R, F)                     # (N S_m) x kk
        Rinv = la.right_inverse(R, F) if S_n else F.zeros(N * S_m, 0)
        tg = tgt.raise_maps[m + d]
        if families is None:
            families = _sparse_first_stage(tg, K, T_m, S_m, m, F) if K.shape[1] else \
                _elementary(src, tgt, d, m)
        else:
            families = _dense_stage(families, tg, K, m, F)
        for fam in families:
            B = np.concatenate([F.matmul(tg[i], fam[m]) for i in range(N)], axis=1)
            fam[m + 1] = F.matmul(B, Rinv)
        return families
    # general case: unknowns are the coefficients of the current families
    # together with every entry of f_{m+1}
    if families is None:
        families = _elementary(src, tgt, d, m)
    k = len(families)
    cols = []
    for fam in families:
        cols.append(np.concatenate([F.normalize(-F.matmul(tgt.raise_maps[m + d][i], fam[m])).reshape(-1)
                                    for i in range(N)]))
    for a in range(T_n):
        for b in range(S_n):
            e = F.zeros(T_n, S_n)
            e[a, b] = F.scalar(1)
            cols.append(np.concatenate([F.matmul(e, src.raise_maps[m][i]).reshape(-1)
                                        for i in range(N)]))
    A = np.stack(cols, axis=1) if cols else F.zeros(0, 0)
    ker = la.kernel_matrix(A, F)
    out = []
    for z in ker.T:
        fam = _combine(families, z[:k], F)
        fam[m + 1] = F.array(z[k:], (T_n, S_n)) if T_n * S_n else F.zeros(T_n, S_n)
        out.append(fam)
    return out


def _combine(families: List[Family], coeffs, F: FieldSpec) -> Family:
    out: Family = {}
    for deg in families[0] if families else []:
        acc = F.zeros(*families[0][deg].shape)
        for c, fam in zip(coeffs, families):
            if c != 0:
                acc = F.add(acc, F.scale(c, fam[deg]))
        out[deg] = acc
    return out


def _sparse_first_stage(tg: List[Matrix], K: Matrix, T_m: int, S_m: int, m: int,
                        F: FieldSpec) -> List[Family]:
    """Kernel of f -> sum_i tg_i f K_i over all f (T_m x S_m), solved sparsely."""
    N = len(tg)
    kk = K.shape[1]
    p = F.p
    nz_t = [[np.nonzero(tg[i][:, a])[0] for a in range(T_m)] for i in range(N)]
    nz_k = [[np.nonzero(K[i * S_m + b])[0] for b in range(S_m)] for i in range(N)]
    cols: List[SparseVec] = []
    for a in range(T_m):
        for b in range(S_m):
            entry: SparseVec = {}
            for i in range(N):
                for r in nz_t[i][a]:
                    tv = tg[i][r, a]
                    for kap in nz_k[i][b]:
                        key = int(r) * kk + int(kap)
                        nv = entry.get(key, 0) + tv * K[i * S_m + b, kap]
                        if p is not None:
                            nv %= p
                        if nv == 0:
                            entry.pop(key, None)
                        else:
                            entry[key] = nv
            cols.append(entry)
    out = []
    for z in la.sparse_kernel(cols, F, len(cols)):
        f = F.zeros(T_m, S_m)
        for key, c in z.items():
            f[key // S_m, key % S_m] = c
        out.append({m: f})
    return out


def _dense_stage(families: List[Family], tg: List[Matrix], K: Matrix, m: int,
                 F: FieldSpec) -> List[Family]:
    if K.shape[1] == 0 or not families:
        return families
    N = len(tg)
    cols = []
    for fam in families:
        B = np.concatenate([F.matmul(tg[i], fam[m]) for i in range(N)], axis=1)
        cols.append(F.matmul(B, K).reshape(-1))
    A = np.stack(cols, axis=1)
    ker = la.kernel_matrix(A, F)
    return [_combine(families, z, F) for z in ker.T]


# -------------------------------------------------------------- qgr Hom

@dataclass
class QgrHom:
    dims: Dict[int, int]
    stabilized: bool
    value: Optional[int]
    window: int

    def to_numbers(self) -> Dict:
        return {"dims_per_tail": [self.dims[n] for n in sorted(self.dims)],
                "tails": sorted(self.dims), "stabilized": self.stabilized,
                "value": self.value, "window": self.window}


def qgr_hom_dim(src: TruncGradedModule, tgt: TruncGradedModule, d: int,
                n_range: Sequence[int], window: int = DEFAULT_WINDOW) -> QgrHom:
    """dim Hom(src_{>=n}, tgt(d)) for each n; stable if constant over the last window tails."""
    n_range = list(n_range)
    if not n_range:
        raise ValueError("empty tail range")
    dims = {n: graded_hom(src, tgt, d, n).dim for n in n_range}
    last = [dims[n] for n in n_range[-window:]]
    stable = len(last) == window and len(set(last)) == 1
    return QgrHom(dims, stable, last[-1] if stable else None, window)


def truncation(N: int, d: int, hi: Optional[int] = None, window: int = DEFAULT_WINDOW) -> int:
    """Top source degree H for Hom(R, R(d)): R(d) then needs R up to H + d."""
    hi = default_hi(N) if hi is None else hi
    return max(hi - max(d, 0), window)


def qgr_R_hom(N: int, d: int, slices: Optional[Sequence[GradedSlice]] = None,
              hi: Optional[int] = None, window: int = DEFAULT_WINDOW,
              field: FieldSpec = FieldSpec.prime()) -> QgrHom:
    """Hom_qgr(R, R(d)) from tails n = 0..H-1 (each tail keeps two or more components)."""
    H = truncation(N, d, hi, window)
    if slices is None or len(slices) <= H + max(d, 0):
        slices = build_slices(N, H + max(d, 0), field)
    src = module_R(N, 0, 0, H, slices)
    tgt = module_R(N, d, 0, H, slices)
    return qgr_hom_dim(src, tgt, 0, range(0, H), window)


def tilting_check(N: int, hi: Optional[int] = None, window: int = DEFAULT_WINDOW,
                  field: FieldSpec = FieldSpec.prime(),
                  slices: Optional[Sequence[GradedSlice]] = None) -> List[Check]:
    """End(R + R(1)) in qgr: Hom dims (1, N, 0, 1), arrows given by left
    multiplication by X_1..X_N, idempotent actions and radical square zero."""
    hi = default_hi(N) if hi is None else hi
    H = max(hi - 1, window)
    if slices is None or len(slices) <= H + 1:
        slices = build_slices(N, H + 1, field)
    F = slices[0].field
    R0 = module_R(N, 0, 0, H, slices)
    R1 = module_R(N, 1, 0, H, slices)
    tails = range(0, H)
    pairs = {"R,R": (R0, R0), "R,R(1)": (R0, R1), "R(1),R": (R1, R0), "R(1),R(1)": (R1, R1)}
    results = {k: qgr_hom_dim(a, b, 0, tails, window) for k, (a, b) in pairs.items()}
    values = [results[k].value for k in pairs]
    expected = [1, N, 0, 1]
    out = [check(f"End(T) dims N={N}", "tilting-endomorphisms",
                 values == expected and all(r.stabilized for r in results.values()),
                 dims=values, expected=expected,
                 per_tail={k: r.to_numbers() for k, r in results.items()})]
    # explicit algebra structure at the last tail
    n = tails[-1]
    arrows = graded_hom(R0, R1, 0, n)
    e0 = graded_hom(R0, R0, 0, n)
    e1 = graded_hom(R1, R1, 0, n)
    back = graded_hom(R1, R0, 0, n)
    top = arrows.top
    ident = lambda M: {m: F.eye(M.dim(m)) for m in range(n, top + 1)}
    lmult = []
    for i in range(1, N + 1):
        lmult.append({m: _left_mult(slices, m, i) for m in range(n, top + 1)})
    lm_ok = all(intertwines(R0, R1, 0, f, n, top) for f in lmult)
    span_ok = _rank_of_families(lmult + arrows.basis, F) == _rank_of_families(arrows.basis, F) \
        == _rank_of_families(lmult, F) == N
    idem_ok = (e0.dim == 1 and e1.dim == 1 and _rank_of_families(e0.basis + [ident(R0)], F) == 1
               and _rank_of_families(e1.basis + [ident(R1)], F) == 1)
    # e1 . a = a = a . e0 for the arrows; composites through Hom(R(1), R) vanish
    act_ok = all(_rank_of_families([_compose(ident(R1), a, F), a], F) <= 1 for a in lmult)
    rad_ok = back.dim == 0
    out.append(check(f"End(T) algebra N={N}", "tilting-endomorphisms",
                     lm_ok and span_ok and idem_ok and act_ok and rad_ok,
                     tail=n, left_mult_are_homs=lm_ok, arrows_span=span_ok,
                     idempotents=idem_ok, unit_actions=act_ok, radical_square_zero=rad_ok))
    return out


def _left_mult(slices: Sequence[GradedSlice], m: int, i: int) -> Matrix:
    """w -> X_i w from R_m to R_{m+1}."""
    s, t = slices[m], slices[m + 1]
    F = s.field
    out = F.zeros(t.dim, s.dim)
    for q, w in enumerate(s.normal_words):
        for k, v in t.coords((i,) + w).items():
            out[k, q] = v
    return out


def _compose(g: Family, f: Family, F: FieldSpec) -> Family:
    return {m: F.matmul(g[m], f[m]) for m in f}


def _rank_of_families(fams: List[Family], F: FieldSpec) -> int:
    if not fams:
        return 0
    degs = sorted(fams[0])
    vecs = [F.normalize(np.concatenate([f[m].reshape(-1) for m in degs])) for f in fams]
    return la.rank(np.stack(vecs, axis=1), F)


# ------------------------------------------------------ Gamma_* and covers

def gamma_star_projective(which: str, chain, cap: int, lo: int = 0) -> TruncGradedModule:
    """Components Hom(Pi_0, Pi_{n+s}) for n = lo..cap (s = 0 for P1, 1 for P0),
    with X_i acting by post-composition with the chain map x_i."""
    s = {"P1": 0, "P0": 1}.get(which)
    if s is None:
        raise ValueError("which must be 'P1' or 'P0'")
    if lo + s < 0 or cap < lo:
        raise ValueError("degree range starts below Pi_0")
    if cap + s > chain.length:
        raise ValueError("chain too short for the requested cap")
    F = chain.field
    src = chain.reps[0]
    bases = {n: hom_space(src, chain.reps[n + s]) for n in range(lo, cap + 1)}
    dims = {n: len(b) for n, b in bases.items()}
    raise_maps = {}
    for n in range(lo, cap):
        B = _stack_vectors(bases[n + 1], F, src, chain.reps[n + s + 1])
        ms = []
        for i in range(chain.N):
            x = chain.arrows[n + s][i]
            imgs = _stack_vectors([x.compose(g) for g in bases[n]], F, src, chain.reps[n + s + 1])
            m = la.solve_matrix(B, imgs, F) if imgs.shape[1] else F.zeros(dims[n + 1], 0)
            if m is None:
                raise AssertionError("post-composition left the Hom space")
            ms.append(m)
        raise_maps[n] = ms
    return TruncGradedModule(chain.N, F, lo, cap, dims, raise_maps)


def _stack_vectors(morphisms, F: FieldSpec, src, tgt) -> Matrix:
    if not morphisms:
        return F.zeros(src.d0 * tgt.d0 + src.d1 * tgt.d1, 0)
    return np.stack([f.vector() for f in morphisms], axis=1)


def graded_isomorphism(src: TruncGradedModule, tgt: TruncGradedModule, seed: int = 0,
                       draws: int = 20) -> Tuple[Optional[Family], int]:
    """A degree-0 family src -> tgt invertible in every degree, if one is found."""
    F = src.field
    if (src.lo, src.hi) != (tgt.lo, tgt.hi) or any(src.dims[n] != tgt.dims[n] for n in src.dims):
        return None, 0
    space = graded_hom(src, tgt, 0, src.lo)
    if not space.basis:
        return None, 0
    rng = np.random.default_rng(seed)
    for attempt in range(draws):
        if len(space.basis) == 1 and attempt == 0:
            fam = space.basis[0]
        else:
            fam = _combine(space.basis, F.random_scalars(rng, len(space.basis)), F)
        if all(la.is_invertible(fam[m], F) for m in fam):
            return fam, space.dim
    return None, space.dim


def gamma_star_check(which: str, chain, cap: int, slices: Sequence[GradedSlice],
                     seed: int = 0) -> Check:
    s = {"P1": 0, "P0": 1}[which]
    G = gamma_star_projective(which, chain, cap)
    Rs = module_R(chain.N, s, 0, cap, slices)
    fam, hdim = graded_isomorphism(Rs, G, seed=seed)
    ok = fam is not None and intertwines(Rs, G, 0, fam, 0, cap)
    target = "R" if s == 0 else "R(1)"
    return check(f"Gamma_*({which}) = {target} N={chain.N}", "gamma-star-projectives", ok,
                 cap=cap, dims=[G.dims[n] for n in range(cap + 1)], hom_dim=hdim,
                 witness_invertible=fam is not None)


@dataclass
class Cover:
    ok: bool
    degrees: List[int]                     # l_i: summand R(-l_i), generated in degree l_i
    generators: List[Tuple[int, Matrix]]
    families: Dict[int, Matrix]            # (sum_i R(-l_i))_m -> M_m
    surjective: bool
    intertwines: bool

    @property
    def count(self) -> int:
        return len(self.degrees)


def cover_by_shifts(M: TruncGradedModule, budget: int, slices: Sequence[GradedSlice]) -> Cover:
    """Pick generators degree by degree until every component is reached, then
    build the map from the sum of shifted copies of R and check it."""
    F, N = M.field, M.N
    gens: List[Tuple[int, Matrix]] = []
    span = F.zeros(M.dim(M.lo), 0)
    for m in range(M.lo, M.hi + 1):
        if m > M.lo:
            prev = span
            imgs = [F.matmul(M.raise_maps[m - 1][i], prev) for i in range(N)]
            span = np.concatenate(imgs, axis=1) if imgs else F.zeros(M.dim(m), 0)
            span = la.column_basis(span, F) if span.size else F.zeros(M.dim(m), 0)
        q = la.quotient_basis(M.dim(m), span, F)
        for r in q.representatives:
            v = F.zeros(M.dim(m), 1)
            v[r, 0] = F.scalar(1)
            gens.append((m, v))
            span = np.concatenate([span, v], axis=1)
        if len(gens) > budget:
            return Cover(False, [g[0] for g in gens], gens, {}, False, False)
    if len(slices) <= M.hi - min((g[0] for g in gens), default=M.hi):
        raise ValueError("slices too short for the cover")
    families: Dict[int, Matrix] = {}
    for m in range(M.lo, M.hi + 1):
        blocks = []
        for l, v in gens:
            if m < l:
                continue
            blocks.append(_word_images(M, l, v, m - l, slices))
        families[m] = np.concatenate(blocks, axis=1) if blocks else F.zeros(M.dim(m), 0)
    surj = all(la.rank(families[m], F) == M.dim(m) if M.dim(m) else True
               for m in range(M.lo, M.hi + 1))
    src = direct_sum_graded([module_R(N, -l, M.lo, M.hi, slices)
                             for l, _ in gens]) if gens else None
    inter = src is not None and intertwines(src, M, 0, families, M.lo, M.hi)
    degrees = [g[0] for g in gens]
    return Cover(surj and inter, degrees, gens, families, surj, inter)


def _word_images(M: TruncGradedModule, l: int, v: Matrix, k: int,
                 slices: Sequence[GradedSlice]) -> Matrix:
    """Images g . w of the normal words w of R_k, g = v in degree l."""
    F = M.field
    level = {(): v[:, 0]}
    for j in range(1, k + 1):
        nxt = {}
        for w in slices[j].normal_words:
            nxt[w] = F.matmul(M.raise_maps[l + j - 1][w[-1] - 1], level[w[:-1]].reshape(-1, 1))[:, 0]
        level = nxt
    words = slices[k].normal_words
    return np.stack([level[w] for w in words], axis=1) if words else F.zeros(M.dim(l + k), 0)
