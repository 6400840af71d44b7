"""Representations of the N-Kronecker quiver 0 ==(N arrows)==> 1.

A representation is a pair of spaces (M0, M1) with N matrices phi_i: M0 -> M1,
each of shape d1 x d0. Morphisms are pairs (f0, f1) with f1 phi_i = phi'_i f0.
"""

import json
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import exactla as la
from .exactla import FieldSpec, Matrix

DENSE_LIMIT = 900


@dataclass(frozen=True)
class DimVector:
    d0: int
    d1: int

    def __post_init__(self):
        if self.d0 < 0 or self.d1 < 0:
            raise ValueError("dimensions must be nonnegative")

    def __iter__(self):
        return iter((self.d0, self.d1))

    @property
    def total(self) -> int:
        return self.d0 + self.d1


class KronRep:
    """A representation (M0, M1, phi_1..phi_N) over a fixed field."""

    def __init__(self, N: int, d0: int, d1: int, maps: Sequence[Matrix], field: FieldSpec):
        if N < 1:
            raise ValueError("N must be positive")
        if len(maps) != N:
            raise ValueError(f"expected {N} maps, got {len(maps)}")
        self.N = N
        self.field = field
        self.dim = DimVector(d0, d1)
        ms = []
        for i, m in enumerate(maps):
            m = np.asarray(m)
            if m.shape != (d1, d0):
                raise ValueError(f"map {i + 1} has shape {m.shape}, expected {(d1, d0)}")
            ms.append(field.array(m) if m.dtype != field.dtype else field.normalize(m.copy()))
        self.maps: Tuple[Matrix, ...] = tuple(ms)

    @property
    def d0(self) -> int:
        return self.dim.d0

    @property
    def d1(self) -> int:
        return self.dim.d1

    def __repr__(self):
        return f"KronRep(N={self.N}, dim=({self.d0},{self.d1}), field={self.field.name})"

    def row_map(self) -> Matrix:
        """[phi_1 | ... | phi_N]: V (x) M0 -> M1, blocks indexed by arrow."""
        if self.N == 0:
            return self.field.zeros(self.d1, 0)
        return np.concatenate(self.maps, axis=1) if self.d0 else self.field.zeros(self.d1, 0)

    def col_map(self) -> Matrix:
        """[phi_1; ...; phi_N]: M0 -> V (x) M1."""
        return np.concatenate(self.maps, axis=0) if self.d1 else self.field.zeros(0, self.d0)

    def is_generated(self) -> bool:
        """M1 is spanned by the images of the arrows (no S1 summand in the top)."""
        return la.rank(self.row_map(), self.field) == self.d1

    def is_cogenerated(self) -> bool:
        """The arrows are jointly injective on M0 (no S0 summand in the socle)."""
        return la.rank(self.col_map(), self.field) == self.d0

    def same_as(self, other: "KronRep") -> bool:
        return (self.N == other.N and self.field == other.field and self.dim == other.dim
                and all(self.field.equal(a, b) for a, b in zip(self.maps, other.maps)))

    # serialization

    def to_json(self) -> Dict:
        f = self.field
        return {"n": self.N, "d0": self.d0, "d1": self.d1,
                "maps": [[f.fmt(x) for x in m.reshape(-1)] for m in self.maps]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def from_json(cls, data: Dict, field: FieldSpec) -> "KronRep":
        try:
            N, d0, d1, maps = int(data["n"]), int(data["d0"]), int(data["d1"]), data["maps"]
        except (KeyError, TypeError, ValueError) as e:
            raise ValueError(f"malformed representation JSON: {e}") from None
        if not isinstance(maps, list) or len(maps) != N:
            raise ValueError(f"'maps' must be a list of {N} entry lists")
        ms = []
        for i, entries in enumerate(maps):
            if not isinstance(entries, list) or len(entries) != d0 * d1:
                raise ValueError(f"map {i + 1} must have {d0 * d1} entries")
            vals = [field.parse(v) for v in entries]
            a = field.zeros(d1, d0)
            if d0 * d1:
                a.reshape(-1)[:] = vals
            ms.append(a)
        return cls(N, d0, d1, ms, field)

    @classmethod
    def loads(cls, text: str, field: FieldSpec) -> "KronRep":
        return cls.from_json(json.loads(text), field)


class RepMorphism:
    """A morphism (f0, f1): M -> M'. The intertwining identity is verified."""

    def __init__(self, src: KronRep, tgt: KronRep, f0: Matrix, f1: Matrix, check: bool = True):
        if src.N != tgt.N or src.field != tgt.field:
            raise ValueError("morphism between representations of different quivers/fields")
        if f0.shape != (tgt.d0, src.d0) or f1.shape != (tgt.d1, src.d1):
            raise ValueError(f"morphism blocks have shapes {f0.shape}, {f1.shape}")
        self.src, self.tgt, self.f0, self.f1 = src, tgt, f0, f1
        if check and not self.intertwines():
            raise ValueError("maps do not intertwine the arrows")

    @property
    def field(self) -> FieldSpec:
        return self.src.field

    def intertwines(self) -> bool:
        F = self.field
        for a, b in zip(self.src.maps, self.tgt.maps):
            if not F.equal(F.matmul(self.f1, a), F.matmul(b, self.f0)):
                return False
        return True

    def compose(self, first: "RepMorphism") -> "RepMorphism":
        """self o first."""
        F = self.field
        return RepMorphism(first.src, self.tgt, F.matmul(self.f0, first.f0),
                           F.matmul(self.f1, first.f1), check=False)

    def __add__(self, other: "RepMorphism") -> "RepMorphism":
        F = self.field
        return RepMorphism(self.src, self.tgt, F.add(self.f0, other.f0), F.add(self.f1, other.f1),
                           check=False)

    def scaled(self, c) -> "RepMorphism":
        F = self.field
        return RepMorphism(self.src, self.tgt, F.scale(c, self.f0), F.scale(c, self.f1), check=False)

    def is_zero(self) -> bool:
        return self.field.is_zero(self.f0) and self.field.is_zero(self.f1)

    def ranks(self) -> Tuple[int, int]:
        return la.rank(self.f0, self.field), la.rank(self.f1, self.field)

    def is_injective(self) -> bool:
        r0, r1 = self.ranks()
        return r0 == self.src.d0 and r1 == self.src.d1

    def is_surjective(self) -> bool:
        r0, r1 = self.ranks()
        return r0 == self.tgt.d0 and r1 == self.tgt.d1

    def is_invertible(self) -> bool:
        return self.src.dim == self.tgt.dim and self.is_injective()

    def vector(self) -> Matrix:
        """Flattened (f0, f1), used to compare morphisms as vectors."""
        return np.concatenate([self.f0.reshape(-1), self.f1.reshape(-1)])


def identity(M: KronRep) -> RepMorphism:
    return RepMorphism(M, M, M.field.eye(M.d0), M.field.eye(M.d1), check=False)


def zero_morphism(M: KronRep, Np: KronRep) -> RepMorphism:
    F = M.field
    return RepMorphism(M, Np, F.zeros(Np.d0, M.d0), F.zeros(Np.d1, M.d1), check=False)


def zero_rep(N: int, field: FieldSpec) -> KronRep:
    return KronRep(N, 0, 0, [field.zeros(0, 0)] * N, field)


def standard_rep(name: str, N: int, field: FieldSpec = FieldSpec.prime()) -> KronRep:
    """P0, P1 (= S1), S0, S1 or I1."""
    F = field
    if name in ("P1", "S1"):
        return KronRep(N, 0, 1, [F.zeros(1, 0)] * N, F)
    if name == "S0":
        return KronRep(N, 1, 0, [F.zeros(0, 1)] * N, F)
    if name == "P0":
        maps = []
        for i in range(N):
            m = F.zeros(N, 1)
            m[i, 0] = F.scalar(1)
            maps.append(m)
        return KronRep(N, 1, N, maps, F)
    if name == "I1":
        maps = []
        for i in range(N):
            m = F.zeros(1, N)
            m[0, i] = F.scalar(1)
            maps.append(m)
        return KronRep(N, N, 1, maps, F)
    raise ValueError(f"unknown standard representation {name!r}")


def random_rep(N: int, d0: int, d1: int, field: FieldSpec, rng: np.random.Generator) -> KronRep:
    """Entries uniform over F_p, integers in [-3, 3] over Q."""
    return KronRep(N, d0, d1, [field.random_matrix(rng, d1, d0) for _ in range(N)], field)


def direct_sum(reps: Sequence[KronRep]) -> KronRep:
    if not reps:
        raise ValueError("direct_sum needs at least one summand (use zero_rep)")
    N, F = reps[0].N, reps[0].field
    d0 = sum(r.d0 for r in reps)
    d1 = sum(r.d1 for r in reps)
    maps = [la.block_diag([r.maps[i] for r in reps], F) for i in range(N)]
    return KronRep(N, d0, d1, maps, F)


def tensor_by_space(m: int, M: KronRep) -> KronRep:
    """k^m (x) M, the m-fold direct sum; summand a occupies block a."""
    if m == 0:
        return zero_rep(M.N, M.field)
    return direct_sum([M] * m)


def sum_inclusion(reps: Sequence[KronRep], k: int, total: Optional[KronRep] = None) -> RepMorphism:
    total = total or direct_sum(reps)
    F = total.field
    o0 = sum(r.d0 for r in reps[:k])
    o1 = sum(r.d1 for r in reps[:k])
    f0 = F.zeros(total.d0, reps[k].d0)
    f1 = F.zeros(total.d1, reps[k].d1)
    for j in range(reps[k].d0):
        f0[o0 + j, j] = F.scalar(1)
    for j in range(reps[k].d1):
        f1[o1 + j, j] = F.scalar(1)
    return RepMorphism(reps[k], total, f0, f1, check=False)


def sum_projection(reps: Sequence[KronRep], k: int, total: Optional[KronRep] = None) -> RepMorphism:
    inc = sum_inclusion(reps, k, total)
    return RepMorphism(inc.tgt, inc.src, inc.f0.T.copy(), inc.f1.T.copy(), check=False)


# ------------------------------------------------------------------- Hom

def _dense_hom(X: KronRep, Y: KronRep) -> List[Tuple[Matrix, Matrix]]:
    F = X.field
    d0, d1, e0, e1 = X.d0, X.d1, Y.d0, Y.d1
    n0, n1 = e0 * d0, e1 * d1
    if n0 + n1 == 0:
        return []
    blocks = []
    if e1 * d0:
        for a, b in zip(X.maps, Y.maps):
            # row-major vec: vec(f1 a) = (I (x) a^T) vec f1, vec(b f0) = (b (x) I) vec f0
            left = F.normalize(-np.kron(b, F.eye(d0))) if F.p is not None else -np.kron(b, F.eye(d0))
            right = np.kron(F.eye(e1), a.T)
            blocks.append(np.concatenate([left.reshape(e1 * d0, n0), right.reshape(e1 * d0, n1)], axis=1))
    system = np.concatenate(blocks, axis=0) if blocks else F.zeros(0, n0 + n1)
    K = la.kernel_matrix(system, F)
    out = []
    for j in range(K.shape[1]):
        v = K[:, j]
        out.append((v[:n0].reshape(e0, d0).copy(), v[n0:].reshape(e1, d1).copy()))
    return out


class _Reduction:
    """An exact shrinking of a representation used to transport Hom spaces.

    kind 'gen' (top generated by the arrows): X -> (ker Phi, X0) with the
    inclusion ker Phi -> V (x) X0; a morphism is determined by f0.
    kind 'cogen' (arrows jointly injective): X -> (X1, coker Phi^col); a
    morphism is determined by f1.
    """

    def __init__(self, X: KronRep, kind: str):
        F = X.field
        N = X.N
        self.X, self.kind = X, kind
        if kind == "gen":
            phi = X.row_map()
            self.inc = la.kernel_matrix(phi, F)            # (N d0) x k
            self.rinv = la.right_inverse(phi, F) if X.d1 else F.zeros(N * X.d0, 0)
            k = self.inc.shape[1]
            maps = [self.inc[i * X.d0:(i + 1) * X.d0, :] for i in range(N)]
            self.red = KronRep(N, k, X.d0, maps, F)
        else:
            col = X.col_map()                              # (N d1) x d0
            q = la.quotient_basis(N * X.d1, col, F)
            self.proj = q.matrix                           # c x (N d1)
            self.linv = la.left_inverse(col, F) if X.d0 else F.zeros(0, N * X.d1)
            maps = [self.proj[:, i * X.d1:(i + 1) * X.d1] for i in range(N)]
            self.red = KronRep(N, X.d1, q.dim, maps, F)


def _kron_id(N: int, g: Matrix, F: FieldSpec) -> Matrix:
    """I_V (x) g with arrow-major blocks."""
    return la.block_diag([g] * N, F)


def _lift(rx: _Reduction, ry: _Reduction, h: Matrix, g: Matrix) -> Tuple[Matrix, Matrix]:
    F = rx.X.field
    N = rx.X.N
    if rx.kind == "gen":
        # (h, g): sigma X -> sigma Y; f0 = g, f1 induced on V (x) X0 / ker
        f0 = g
        f1 = F.matmul(F.matmul(ry.X.row_map(), _kron_id(N, g, F)), rx.rinv)
        return f0, f1
    # (g, h) with g on X1; f1 = g, f0 through the injective column maps
    f1 = h
    f0 = F.matmul(F.matmul(ry.linv, _kron_id(N, h, F)), rx.X.col_map())
    return f0, f1


def _size(X: KronRep, Y: KronRep) -> int:
    return X.d0 * Y.d0 + X.d1 * Y.d1


def _hom_pairs(X: KronRep, Y: KronRep, limit: int) -> List[Tuple[Matrix, Matrix]]:
    size = _size(X, Y)
    if size == 0:
        return []
    if size <= limit:
        return _dense_hom(X, Y)
    options = []
    if X.d1 and Y.d1 and X.is_generated() and Y.is_generated():
        nx = (X.N * X.d0 - X.d1, X.d0)
        ny = (Y.N * Y.d0 - Y.d1, Y.d0)
        options.append((nx[0] * ny[0] + nx[1] * ny[1], "gen"))
    if X.d0 and Y.d0 and X.is_cogenerated() and Y.is_cogenerated():
        nx = (X.d1, X.N * X.d1 - X.d0)
        ny = (Y.d1, Y.N * Y.d1 - Y.d0)
        options.append((nx[0] * ny[0] + nx[1] * ny[1], "cogen"))
    options = [o for o in options if o[0] < size]
    if not options:
        return _dense_hom(X, Y)
    kind = min(options)[1]
    rx = _Reduction(X, kind)
    ry = rx if Y is X else _Reduction(Y, kind)
    out = []
    for a, b in _hom_pairs(rx.red, ry.red, limit):
        out.append(_lift(rx, ry, a, b))
    return out


def hom_space(M: KronRep, Np: KronRep, dense_limit: int = DENSE_LIMIT) -> List[RepMorphism]:
    """A basis of Hom(M, N').

    Small cases solve the intertwining equations directly. Large ones are
    first shrunk by an exact reduction: when both tops are generated by the
    arrows (or both socles are cogenerated) Hom(X, Y) is in bijection with
    Hom of the reduced pair; the preconditions are verified by rank and every
    lifted morphism is re-checked against the intertwining identity.
    """
    if M.N != Np.N or M.field != Np.field:
        raise ValueError("representations over different quivers or fields")
    return [RepMorphism(M, Np, f0, f1, check=True) for f0, f1 in _hom_pairs(M, Np, dense_limit)]


def hom_dim(M: KronRep, Np: KronRep) -> int:
    return len(hom_space(M, Np))


def morphism_coordinates(basis: Sequence[RepMorphism], f: RepMorphism) -> Optional[Matrix]:
    """Coordinates of f in the given basis, None if f is not in its span."""
    F = f.field
    if not basis:
        return F.zeros(0) if f.is_zero() else None
    B = np.stack([b.vector() for b in basis], axis=1)
    return la.solve(B, f.vector(), F)


# ----------------------------------------------------------------- forms

def euler_form(d: DimVector, e: DimVector, N: int) -> int:
    d0, d1 = d
    e0, e1 = e
    return d0 * e0 + d1 * e1 - N * d0 * e1


def coxeter_matrix(N: int) -> List[List[int]]:
    return [[-1, N], [-N, N * N - 1]]


def coxeter_apply(d: DimVector, N: int) -> DimVector:
    c = coxeter_matrix(N)
    return DimVector(c[0][0] * d.d0 + c[0][1] * d.d1, c[1][0] * d.d0 + c[1][1] * d.d1)


def projective_presentation(M: KronRep) -> Tuple[RepMorphism, RepMorphism]:
    """0 -> P1^(N d0) -p-> P0^d0 + P1^d1 -e-> M -> 0.

    The generator (i, a) of P1^(N d0) goes to x_i times the a-th P0 generator
    minus phi_i(m_a) written in the P1^d1 generators.
    """
    F, N = M.field, M.N
    P0, P1 = standard_rep("P0", N, F), standard_rep("P1", N, F)
    Q0 = direct_sum([P0] * M.d0 + [P1] * M.d1) if M.d0 + M.d1 else zero_rep(N, F)
    Q1 = tensor_by_space(N * M.d0, P1)
    # Q0 has vertex-0 space k^d0 and vertex-1 space (V (x) k^d0) + k^d1,
    # P0 block a contributing rows a*N .. a*N+N-1 at vertex 1
    f1 = F.zeros(Q0.d1, Q1.d1)
    for i in range(N):
        for a in range(M.d0):
            col = i * M.d0 + a
            f1[a * N + i, col] = F.scalar(1)
            for b in range(M.d1):
                f1[N * M.d0 + b, col] = F.normalize(-M.maps[i][b, a]) if F.p is not None else -M.maps[i][b, a]
    pres = RepMorphism(Q1, Q0, F.zeros(Q0.d0, 0), f1)
    # evaluation Q0 -> M: P0 generator a -> m_a, P1 generator b -> m'_b
    e0 = F.eye(M.d0)
    e1 = F.zeros(M.d1, Q0.d1)
    for a in range(M.d0):
        for i in range(N):
            e1[:, a * N + i] = M.maps[i][:, a]
    e1[:, N * M.d0:] = F.eye(M.d1)
    ev = RepMorphism(Q0, M, e0, e1)
    return pres, ev


def ext1_dim(M: KronRep, Np: KronRep) -> int:
    """dim Ext^1(M, N') as the cokernel of Hom(Q0, N') -> Hom(Q1, N').

    Both Hom spaces are solved generically on the projective terms and the
    induced map is precomposition with the presentation morphism.
    """
    F = M.field
    pres, ev = projective_presentation(M)
    exact = (pres.is_injective() and ev.is_surjective()
             and F.is_zero(F.matmul(ev.f1, pres.f1))
             and pres.tgt.dim.total - pres.src.dim.total == M.dim.total)
    if not exact:
        raise AssertionError("projective presentation is not exact")
    Q1, Q0 = pres.src, pres.tgt
    h0 = hom_space(Q0, Np)
    h1 = hom_space(Q1, Np)
    if not h1:
        return 0
    B1 = np.stack([b.vector() for b in h1], axis=1)
    if not h0:
        return len(h1)
    images = np.stack([g.compose(pres).vector() for g in h0], axis=1)
    coords = la.solve_matrix(B1, images, F)
    if coords is None:
        raise AssertionError("precomposition left the Hom space")
    return len(h1) - la.rank(coords, F)


# ---------------------------------------------------- kernels and friends

def kernel_rep(f: RepMorphism) -> Tuple[KronRep, RepMorphism]:
    F = f.field
    k0 = la.kernel_matrix(f.f0, F)
    k1 = la.kernel_matrix(f.f1, F)
    maps = []
    for a in f.src.maps:
        img = F.matmul(a, k0)
        c = la.solve_matrix(k1, img, F)
        if c is None:
            raise AssertionError("arrow does not preserve the kernel")
        maps.append(c)
    K = KronRep(f.src.N, k0.shape[1], k1.shape[1], maps, F)
    return K, RepMorphism(K, f.src, k0, k1)


def image_rep(f: RepMorphism) -> Tuple[KronRep, RepMorphism]:
    F = f.field
    b0 = la.column_basis(f.f0, F)
    b1 = la.column_basis(f.f1, F)
    maps = []
    for a in f.tgt.maps:
        c = la.solve_matrix(b1, F.matmul(a, b0), F)
        if c is None:
            raise AssertionError("arrow does not preserve the image")
        maps.append(c)
    I = KronRep(f.src.N, b0.shape[1], b1.shape[1], maps, F)
    return I, RepMorphism(I, f.tgt, b0, b1)


def subrep_from_spans(M: KronRep, b0: Matrix, b1: Matrix) -> Tuple[KronRep, RepMorphism]:
    """Subrepresentation with the given (independent) basis columns."""
    F = M.field
    maps = []
    for a in M.maps:
        c = la.solve_matrix(b1, F.matmul(a, b0), F)
        if c is None:
            raise ValueError("spans are not closed under the arrows")
        maps.append(c)
    S = KronRep(M.N, b0.shape[1], b1.shape[1], maps, F)
    return S, RepMorphism(S, M, b0, b1)


def quotient_rep(M: KronRep, b0: Matrix, b1: Matrix) -> Tuple[KronRep, RepMorphism]:
    """M modulo the subrepresentation spanned by b0, b1."""
    F = M.field
    q0 = la.quotient_basis(M.d0, b0, F)
    q1 = la.quotient_basis(M.d1, b1, F)
    maps = []
    for a in M.maps:
        # induced map: q1 . a . (inclusion of representatives)
        sec = F.zeros(M.d0, q0.dim)
        for j, r in enumerate(q0.representatives):
            sec[r, j] = F.scalar(1)
        maps.append(F.matmul(q1.matrix, F.matmul(a, sec)))
    Q = KronRep(M.N, q0.dim, q1.dim, maps, F)
    return Q, RepMorphism(M, Q, q0.matrix, q1.matrix)


def cokernel_rep(f: RepMorphism) -> Tuple[KronRep, RepMorphism]:
    return quotient_rep(f.tgt, f.f0, f.f1)


# ------------------------------------------------------------- reflections

def _reflect_source(spaces_src: int, spaces_tgt: int, maps: Sequence[Matrix], F: FieldSpec
                    ) -> Tuple[int, List[Matrix], int]:
    """Reflect at a source s with arrows a_i: M_s -> M_t.

    New space at s: coker(M_s -> M_t^N), reversed arrows M_t -> new space.
    """
    N = len(maps)
    col = np.concatenate(maps, axis=0) if spaces_tgt else F.zeros(0, spaces_src)
    injective = la.rank(col, F) == spaces_src
    q = la.quotient_basis(N * spaces_tgt, col, F)
    new = [q.matrix[:, i * spaces_tgt:(i + 1) * spaces_tgt] for i in range(N)]
    return q.dim, new, int(injective)


def reflection_minus(M: KronRep) -> KronRep:
    """Inverse Coxeter functor as two source reflections (vertex 0, then 1).

    Dimension vectors transform by [[-1, N], [-N, N^2 - 1]] on modules
    without injective summands.
    """
    F = M.field
    # vertex 0 is a source: M0' = coker(M0 -> M1^N), arrows now M1 -> M0'
    d0n, rev, _ = _reflect_source(M.d0, M.d1, M.maps, F)
    # vertex 1 is now a source: M1' = coker(M1 -> M0'^N), arrows M0' -> M1'
    d1n, maps, _ = _reflect_source(M.d1, d0n, rev, F)
    out = KronRep(M.N, d0n, d1n, maps, F)
    expect = coxeter_apply(M.dim, M.N)
    if out.dim != expect:
        raise AssertionError(f"reflection gave {out.dim}, Coxeter matrix predicts {expect}")
    return out


# ------------------------------------------------------------ isomorphism

@dataclass
class IsoResult:
    isomorphic: bool
    witness: Optional[RepMorphism]
    evidence: Dict

    def __bool__(self):
        return self.isomorphic


def is_isomorphic(M: KronRep, Np: KronRep, draws: int = 20, seed: int = 0) -> IsoResult:
    """Search an invertible morphism among random combinations of a Hom basis.

    Over F_p coefficients are uniform, over Q integers in [-9, 9]. A False
    answer with equal dimension vectors means no witness was found.
    """
    F = M.field
    if M.dim != Np.dim:
        return IsoResult(False, None, {"reason": "dimension vectors differ"})
    if M.dim.total == 0:
        return IsoResult(True, zero_morphism(M, Np), {"reason": "zero representation"})
    basis = hom_space(M, Np)
    if not basis:
        return IsoResult(False, None, {"reason": "Hom space is zero", "hom_dim": 0})
    rng = np.random.default_rng(seed)
    for t in range(draws):
        cs = F.random_scalars(rng, len(basis))
        f = None
        for c, b in zip(cs, basis):
            if c == 0:
                continue
            term = b.scaled(c)
            f = term if f is None else f + term
        if f is None:
            continue
        if f.is_invertible():
            if not f.intertwines():
                raise AssertionError("combination of homomorphisms failed to intertwine")
            return IsoResult(True, f, {"hom_dim": len(basis), "draw": t})
    return IsoResult(False, None, {"reason": "no invertible combination found (probably non-isomorphic)",
                                   "hom_dim": len(basis), "draws": draws})
