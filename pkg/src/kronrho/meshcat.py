"""The translation quiver Z x Omega_N, its mesh category, and the comparison
with Hom spaces between preprojective modules.

Vertices are pairs (n, x) with x in {0, 1}. Arrows come in two kinds:
straight (n, a): (n, 1) -> (n, 0) and star (n, a)*: (n, 0) -> (n + 1, 1),
for each label a = 1..N. The translation sends (n, x) to (n - 1, x).
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import exactla as la
from .exactla import FieldSpec, SparseEchelon, SparseVec
from .kronrep import hom_space
from .report import Check, check

STRAIGHT, STAR = "straight", "star"


@dataclass(frozen=True, order=True)
class MeshVertex:
    n: int
    x: int

    def __post_init__(self):
        if self.x not in (0, 1):
            raise ValueError("vertex label must be 0 or 1")

    def translate(self, k: int = -1) -> "MeshVertex":
        return MeshVertex(self.n + k, self.x)

    @property
    def height(self) -> int:
        """Position along paths: every arrow raises it by one."""
        return 2 * self.n + (1 - self.x)

    def preproj_index(self) -> int:
        """Index m with (n, 1) <-> Pi_{2n} and (n, 0) <-> Pi_{2n+1}."""
        return self.height


@dataclass(frozen=True, order=True)
class MeshArrow:
    kind: str
    n: int
    label: int

    @property
    def source(self) -> MeshVertex:
        return MeshVertex(self.n, 1) if self.kind == STRAIGHT else MeshVertex(self.n, 0)

    @property
    def target(self) -> MeshVertex:
        return MeshVertex(self.n, 0) if self.kind == STRAIGHT else MeshVertex(self.n + 1, 1)

    def __str__(self):
        star = "*" if self.kind == STAR else ""
        return f"({self.n},{self.label}){star}"


Path = Tuple[MeshArrow, ...]


def outgoing(v: MeshVertex, N: int) -> List[MeshArrow]:
    kind = STRAIGHT if v.x == 1 else STAR
    return [MeshArrow(kind, v.n, a) for a in range(1, N + 1)]


def incoming(v: MeshVertex, N: int) -> List[MeshArrow]:
    if v.x == 0:
        return [MeshArrow(STRAIGHT, v.n, a) for a in range(1, N + 1)]
    return [MeshArrow(STAR, v.n - 1, a) for a in range(1, N + 1)]


def mu(arrow: MeshArrow) -> MeshArrow:
    """The arrow from the translate of the target to the source of ``arrow``."""
    if arrow.kind == STRAIGHT:
        return MeshArrow(STAR, arrow.n - 1, arrow.label)
    return MeshArrow(STRAIGHT, arrow.n, arrow.label)


def enumerate_paths(s: MeshVertex, t: MeshVertex, N: int) -> List[Path]:
    """All directed paths from s to t, in lexicographic order of labels."""
    length = t.height - s.height
    if length < 0:
        return []
    out: List[Path] = []

    def walk(v: MeshVertex, acc: List[MeshArrow]):
        if len(acc) == length:
            if v == t:
                out.append(tuple(acc))
            return
        for a in outgoing(v, N):
            acc.append(a)
            walk(a.target, acc)
            acc.pop()

    walk(s, [])
    return out


def transfer_count(s: MeshVertex, t: MeshVertex, N: int) -> int:
    """Path count from powers of the adjacency matrix on the height window."""
    lo, hi = s.height, t.height
    if hi < lo:
        return 0
    size = hi - lo + 1
    A = np.zeros((size, size), dtype=object)
    for h in range(size - 1):
        A[h + 1, h] = N
    v = np.zeros(size, dtype=object)
    v[0] = 1
    for _ in range(size - 1):
        v = A.dot(v)
    return int(v[size - 1]) if size > 1 else 1


@dataclass
class MeshHom:
    source: MeshVertex
    target: MeshVertex
    N: int
    field: FieldSpec
    paths: List[Path]
    basis: List[Path]                      # paths representing a basis of the quotient
    _nf: Dict[int, SparseVec]              # pivot path index -> combination of basis paths

    @property
    def dim(self) -> int:
        return len(self.basis)

    def index(self, path: Path) -> int:
        return self._index[path]

    def __post_init__(self):
        self._index = {p: k for k, p in enumerate(self.paths)}
        self._basis_pos = {self._index[p]: k for k, p in enumerate(self.basis)}

    def coords(self, path: Path) -> np.ndarray:
        """Coordinates of the class of ``path`` in the basis."""
        F = self.field
        out = F.zeros(self.dim)
        k = self._index[path]
        if k in self._basis_pos:
            out[self._basis_pos[k]] = F.scalar(1)
        else:
            for j, c in self._nf.get(k, {}).items():
                out[self._basis_pos[j]] = c
        return out


def _mesh_relations(s: MeshVertex, t: MeshVertex, N: int, index: Dict[Path, int],
                    field: FieldSpec) -> List[SparseVec]:
    """All p . (sum over arrows into eta of alpha mu(alpha)) . q inside Hom(s, t)."""
    rows: List[SparseVec] = []
    one = field.scalar(1)
    for h in range(s.height + 2, t.height + 1):
        n, r = divmod(h, 2)
        eta = MeshVertex(n, 1 - r)
        start = eta.translate(-1)
        for q in enumerate_paths(s, start, N):
            for p in enumerate_paths(eta, t, N):
                row: SparseVec = {}
                for a in incoming(eta, N):
                    k = index[q + (mu(a), a) + p]
                    row[k] = row.get(k, 0) + one
                rows.append(row)
    return rows


@lru_cache(maxsize=None)
def _mesh_hom_cached(s: MeshVertex, t: MeshVertex, N: int, field: FieldSpec) -> MeshHom:
    paths = enumerate_paths(s, t, N)
    index = {p: k for k, p in enumerate(paths)}
    ech = SparseEchelon(field)
    for row in _mesh_relations(s, t, N, index, field):
        ech.insert(row)
    nf = ech.normal_forms()
    basis = [p for k, p in enumerate(paths) if k not in nf]
    return MeshHom(s, t, N, field, paths, basis, nf)


def mesh_hom(s: MeshVertex, t: MeshVertex, N: int, field: FieldSpec = FieldSpec.prime()) -> MeshHom:
    """Hom(s, t) in the mesh category: paths modulo the mesh ideal."""
    return _mesh_hom_cached(s, t, N, field)


def mesh_compose(second: MeshHom, first: MeshHom) -> np.ndarray:
    """Matrix of composition Hom(b,c) x Hom(a,b) -> Hom(a,c): one column per
    pair of basis paths, in the basis of Hom(a,c)."""
    if first.target != second.source:
        raise ValueError("paths are not composable")
    total = mesh_hom(first.source, second.target, first.N, first.field)
    F = first.field
    cols = [total.coords(p + q) for q in second.basis for p in first.basis]
    if not cols:
        return F.zeros(total.dim, 0)
    return np.stack(cols, axis=1)


def vertex_for_index(m: int) -> MeshVertex:
    """Mesh vertex matching Pi_m."""
    n, r = divmod(m, 2)
    return MeshVertex(n, 1 - r)


def compare_mesh_vs_modules(N: int, window: int, chain, field: Optional[FieldSpec] = None,
                            compositions: bool = True) -> List[Check]:
    """Compare Hom dims (and composition ranks) for Pi-indices 0..window."""
    F = chain.field if field is None else field
    if window > chain.length:
        raise ValueError("chain does not cover the window")
    idx = range(window + 1)
    hom_basis = {}
    out: List[Check] = []
    mismatches = []
    pairs = 0
    for a in idx:
        for b in idx:
            s, t = vertex_for_index(a), vertex_for_index(b)
            mh = mesh_hom(s, t, N, F)
            basis = hom_space(chain.reps[a], chain.reps[b])
            hom_basis[(a, b)] = basis
            npaths = len(enumerate_paths(s, t, N))
            pairs += 1
            if mh.dim != len(basis) or npaths != transfer_count(s, t, N):
                mismatches.append([a, b, mh.dim, len(basis)])
    dims = {f"{a}->{b}": len(hom_basis[(a, b)]) for a in idx for b in idx if a <= b}
    out.append(check(f"mesh dims N={N} window {window}", "mesh-equivalence", not mismatches,
                     pairs=pairs, mismatches=mismatches, module_dims=dims))
    if compositions:
        rank_bad = []
        triples = 0
        for a in idx:
            for b in range(a, window + 1):
                for c in range(b, window + 1):
                    m1 = mesh_hom(vertex_for_index(a), vertex_for_index(b), N, F)
                    m2 = mesh_hom(vertex_for_index(b), vertex_for_index(c), N, F)
                    mesh_rank = la.rank(mesh_compose(m2, m1), F)
                    mod_rank = _module_composition_rank(hom_basis[(a, b)], hom_basis[(b, c)], F)
                    triples += 1
                    if mesh_rank != mod_rank:
                        rank_bad.append([a, b, c, mesh_rank, mod_rank])
        out.append(check(f"mesh composition ranks N={N} window {window}", "mesh-equivalence",
                         not rank_bad, triples=triples, mismatches=rank_bad))
    return out


def _module_composition_rank(first: Sequence, second: Sequence, F: FieldSpec) -> int:
    vecs = [g.compose(f).vector() for g in second for f in first]
    if not vecs:
        return 0
    return la.rank(np.stack(vecs, axis=1), F)
