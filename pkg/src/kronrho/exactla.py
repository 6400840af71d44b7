"""Exact linear algebra over the rationals and prime fields.

Dense matrices are numpy arrays. Over a prime field they have dtype int64
with entries in [0, p); over the rationals they have dtype object holding
``fractions.Fraction`` values. Sparse vectors are plain dicts
``{index: nonzero scalar}``.
"""

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

DEFAULT_PRIME = 32003
# keeps p*p*k below 2**53 for the float matmul path and p*p below 2**63
MAX_PRIME = 1 << 21

Vector = np.ndarray
Matrix = np.ndarray
SparseVec = Dict[int, object]


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Either the rationals (``p is None``) or the prime field of order ``p``."""

    p: Optional[int] = None

    def __post_init__(self):
        if self.p is not None:
            if not isinstance(self.p, int) or not _is_prime(self.p) or self.p == 2:
                raise ValueError(f"field characteristic must be an odd prime, got {self.p}")
            if self.p >= MAX_PRIME:
                raise ValueError(f"prime {self.p} too large (limit {MAX_PRIME})")

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls(None)

    @classmethod
    def prime(cls, p: int = DEFAULT_PRIME) -> "FieldSpec":
        return cls(p)

    @classmethod
    def from_string(cls, text: str) -> "FieldSpec":
        """Parse ``q`` or ``fp:<p>``."""
        t = text.strip().lower()
        if t in ("q", "qq", "rationals"):
            return cls.rationals()
        if t.startswith("fp:"):
            try:
                p = int(t[3:])
            except ValueError:
                raise ValueError(f"bad prime in field spec {text!r}") from None
            return cls.prime(p)
        if t == "fp":
            return cls.prime()
        raise ValueError(f"unknown field spec {text!r}; use 'q' or 'fp:<p>'")

    @property
    def is_rational(self) -> bool:
        return self.p is None

    @property
    def name(self) -> str:
        return "q" if self.p is None else f"fp:{self.p}"

    @property
    def dtype(self):
        return object if self.p is None else np.int64

    # scalars

    def scalar(self, x) -> object:
        if self.p is None:
            return Fraction(x)
        if isinstance(x, Fraction):
            return (x.numerator % self.p) * pow(x.denominator % self.p, -1, self.p) % self.p
        return int(x) % self.p

    def inv(self, x) -> object:
        if self.p is None:
            if x == 0:
                raise ZeroDivisionError("inverse of zero")
            return 1 / Fraction(x)
        x = int(x) % self.p
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, -1, self.p)

    def fmt(self, x) -> object:
        """Exact JSON-friendly form: int when integral, else the string 'a/b'."""
        if self.p is None:
            x = Fraction(x)
            return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
        return int(x)

    def parse(self, v) -> object:
        if isinstance(v, str):
            return self.scalar(Fraction(v.strip()))
        if isinstance(v, bool) or not isinstance(v, int):
            raise ValueError(f"matrix entries must be integers or 'a/b' strings, got {v!r}")
        return self.scalar(v)

    # arrays

    def zeros(self, rows: int, cols: Optional[int] = None) -> np.ndarray:
        shape = (rows,) if cols is None else (rows, cols)
        if self.p is None:
            a = np.empty(shape, dtype=object)
            a.fill(Fraction(0))
            return a
        return np.zeros(shape, dtype=np.int64)

    def eye(self, n: int) -> Matrix:
        a = self.zeros(n, n)
        for i in range(n):
            a[i, i] = self.scalar(1)
        return a

    def array(self, data, shape: Optional[Tuple[int, ...]] = None) -> np.ndarray:
        """Build a canonical array from nested lists / arrays of ints or Fractions."""
        if self.p is None:
            a = np.array(data, dtype=object)
            if shape is not None:
                a = a.reshape(shape)
            out = np.empty(a.shape, dtype=object)
            flat_in, flat_out = a.reshape(-1), out.reshape(-1)
            for k in range(flat_in.size):
                flat_out[k] = Fraction(flat_in[k])
            return out
        a = np.array(data, dtype=object) if not isinstance(data, np.ndarray) else data
        if shape is not None:
            a = a.reshape(shape)
        if a.dtype == object:
            out = np.empty(a.shape, dtype=np.int64)
            flat_in, flat_out = a.reshape(-1), out.reshape(-1)
            for k in range(flat_in.size):
                flat_out[k] = self.scalar(flat_in[k])
            return out
        return np.mod(a.astype(np.int64), self.p)

    def normalize(self, a: np.ndarray) -> np.ndarray:
        if self.p is None:
            return a
        return np.mod(a, self.p)

    def matmul(self, a: Matrix, b: Matrix) -> Matrix:
        if a.shape[-1] != b.shape[0]:
            raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
        if self.p is None:
            if a.size == 0 or b.size == 0:
                shape = a.shape[:-1] + b.shape[1:]
                return self.zeros(*shape) if shape else Fraction(0)
            return np.dot(a, b)
        k = a.shape[-1]
        if k == 0:
            return np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.int64)
        # float64 BLAS is exact while k * (p-1)^2 < 2^53
        chunk = max(1, (1 << 53) // ((self.p - 1) ** 2 + 1))
        if k <= chunk:
            return np.mod(np.rint(a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64), self.p)
        out = None
        for s in range(0, k, chunk):
            part = self.matmul(a[..., s:s + chunk], b[s:s + chunk])
            out = part if out is None else np.mod(out + part, self.p)
        return out

    def add(self, a, b):
        return self.normalize(a + b)

    def sub(self, a, b):
        return self.normalize(a - b)

    def scale(self, c, a):
        return self.normalize(self.scalar(c) * a)

    def is_zero(self, a: np.ndarray) -> bool:
        if a.size == 0:
            return True
        if self.p is None:
            return all(x == 0 for x in a.reshape(-1))
        return not np.any(a)

    def equal(self, a: np.ndarray, b: np.ndarray) -> bool:
        return a.shape == b.shape and self.is_zero(self.sub(a, b))

    def random_matrix(self, rng: np.random.Generator, rows: int, cols: int,
                      small: int = 3) -> Matrix:
        """Uniform entries over F_p; integers in [-small, small] over Q."""
        if self.p is None:
            vals = rng.integers(-small, small + 1, size=(rows, cols))
            return self.array(vals.tolist() if rows * cols else vals, shape=(rows, cols))
        return rng.integers(0, self.p, size=(rows, cols), dtype=np.int64)

    def random_scalars(self, rng: np.random.Generator, count: int, small: int = 9) -> List:
        if self.p is None:
            return [Fraction(int(v)) for v in rng.integers(-small, small + 1, size=count)]
        return [int(v) for v in rng.integers(0, self.p, size=count)]


# ---------------------------------------------------------------- dense

def rref(m: Matrix, field: FieldSpec) -> Tuple[Matrix, List[int], int]:
    """Reduced row echelon form. Returns (reduced, pivot_cols, rank)."""
    a = np.array(m, dtype=field.dtype, copy=True)
    if a.ndim != 2:
        raise ValueError("rref expects a 2-d matrix")
    rows, cols = a.shape
    pivots: List[int] = []
    r = 0
    p = field.p
    for c in range(cols):
        if r >= rows:
            break
        col = a[r:, c]
        if p is None:
            nz = [i for i in range(col.size) if col[i] != 0]
            if not nz:
                continue
            k = r + nz[0]
        else:
            nz = np.flatnonzero(col)
            if nz.size == 0:
                continue
            k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        piv_inv = field.inv(a[r, c])
        a[r, c:] = field.normalize(a[r, c:] * piv_inv)
        colv = a[:, c].copy()
        colv[r] = 0
        if p is None:
            idx = np.array([i for i in range(rows) if colv[i] != 0], dtype=np.int64)
        else:
            idx = np.flatnonzero(colv)
        if idx.size:
            upd = a[idx, c:] - np.outer(colv[idx], a[r, c:])
            a[idx, c:] = field.normalize(upd)
        pivots.append(c)
        r += 1
    return a, pivots, r


def rank(m: Matrix, field: FieldSpec) -> int:
    if m.size == 0:
        return 0
    # eliminate along the shorter side
    if m.shape[0] > m.shape[1]:
        m = m.T
    if field.p is None:
        return rref(m, field)[2]
    # forward elimination only
    a = np.array(m, dtype=np.int64, copy=True)
    p = field.p
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        below = a[r + 1:, c]
        idx = np.flatnonzero(below)
        if idx.size:
            factor = below[idx] * pow(int(a[r, c]), -1, p) % p
            a[r + 1 + idx, c:] = (a[r + 1 + idx, c:] - np.outer(factor, a[r, c:])) % p
        r += 1
    return r


def kernel_matrix(m: Matrix, field: FieldSpec) -> Matrix:
    """Columns form a basis of the right null space of m."""
    rows, cols = m.shape
    if rows == 0:
        return field.eye(cols)
    red, piv, rk = rref(m, field)
    free = [c for c in range(cols) if c not in set(piv)]
    k = field.zeros(cols, len(free))
    one = field.scalar(1)
    for j, fc in enumerate(free):
        k[fc, j] = one
        for i, pc in enumerate(piv):
            k[pc, j] = field.normalize(-red[i, fc]) if field.p is not None else -red[i, fc]
    return k


def kernel_basis(m: Matrix, field: FieldSpec) -> List[Vector]:
    k = kernel_matrix(m, field)
    return [k[:, j].copy() for j in range(k.shape[1])]


def solve_matrix(m: Matrix, b: Matrix, field: FieldSpec) -> Optional[Matrix]:
    """Some X with m X = b, or None if no solution exists."""
    if b.ndim != 2 or m.shape[0] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {m.shape} vs rhs {b.shape}")
    rows, cols = m.shape
    if rows == 0:
        return field.zeros(cols, b.shape[1])
    aug = np.concatenate([m, b], axis=1)
    red, piv, rk = rref(aug, field)
    if any(pc >= cols for pc in piv):
        return None
    x = field.zeros(cols, b.shape[1])
    for i, pc in enumerate(piv):
        x[pc, :] = red[i, cols:]
    return x


def solve(m: Matrix, b: Vector, field: FieldSpec) -> Optional[Vector]:
    b = np.asarray(b)
    if b.ndim != 1 or b.shape[0] != m.shape[0]:
        raise ValueError(f"dimension mismatch: matrix has {m.shape[0]} rows, rhs has shape {b.shape}")
    x = solve_matrix(m, b.reshape(-1, 1), field)
    return None if x is None else x[:, 0]


def column_basis(m: Matrix, field: FieldSpec) -> Matrix:
    """Independent columns of m spanning its column space (pivot columns)."""
    if m.shape[1] == 0:
        return field.zeros(m.shape[0], 0)
    _, piv, _ = rref(m, field)
    return m[:, piv].copy()


def in_column_space(m: Matrix, v: Matrix, field: FieldSpec) -> bool:
    if v.ndim == 1:
        v = v.reshape(-1, 1)
    return solve_matrix(m, v, field) is not None


def inverse(m: Matrix, field: FieldSpec) -> Optional[Matrix]:
    n = m.shape[0]
    if m.shape != (n, n):
        return None
    if n == 0:
        return field.zeros(0, 0)
    red, piv, rk = rref(np.concatenate([m, field.eye(n)], axis=1), field)
    if rk < n or piv[n - 1] != n - 1:
        return None
    return red[:, n:].copy()


def is_invertible(m: Matrix, field: FieldSpec) -> bool:
    return m.shape[0] == m.shape[1] and rank(m, field) == m.shape[0]


@dataclass
class Quotient:
    """A complement of a subspace chosen among standard basis vectors.

    ``matrix`` (q x ambient) sends a vector to its coordinates in the quotient;
    it kills the subspace and restricts to the identity on the representatives.
    """

    ambient_dim: int
    representatives: List[int]
    matrix: Matrix
    field: FieldSpec = dc_field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.representatives)

    def project(self, v: np.ndarray) -> np.ndarray:
        return self.field.matmul(self.matrix, v)

    def __call__(self, v):
        return self.project(v)


def quotient_basis(ambient_dim: int, subspace: Sequence[Vector] | Matrix,
                   field: FieldSpec) -> Quotient:
    """Quotient of k^ambient_dim by the span of the given vectors (or matrix columns)."""
    if isinstance(subspace, np.ndarray) and subspace.ndim == 2:
        s = subspace
    else:
        vecs = list(subspace)
        for v in vecs:
            if len(v) != ambient_dim:
                raise ValueError("subspace vector has wrong length")
        s = np.stack(vecs, axis=1) if vecs else field.zeros(ambient_dim, 0)
    if s.shape[0] != ambient_dim:
        raise ValueError("subspace vectors have wrong length")
    if s.shape[1] == 0:
        return Quotient(ambient_dim, list(range(ambient_dim)), field.eye(ambient_dim), field)
    # row-reduce the transposed span with the last coordinates first, so that
    # pivots prefer high indices and representatives are the leftover ones
    rev = s.T[:, ::-1]
    red, piv, rk = rref(rev, field)
    piv_idx = [ambient_dim - 1 - c for c in piv]
    piv_set = set(piv_idx)
    reps = [i for i in range(ambient_dim) if i not in piv_set]
    # a pivot coordinate e_c is congruent to -(rest of its reduced row)
    q = field.zeros(len(reps), ambient_dim)
    pos = {c: j for j, c in enumerate(reps)}
    one = field.scalar(1)
    for c, j in pos.items():
        q[j, c] = one
    red_f = red[:rk, ::-1]
    for i, c in enumerate(piv_idx):
        row = red_f[i]
        for c2, j in pos.items():
            if row[c2] != 0:
                q[j, c] = field.normalize(-row[c2]) if field.p is not None else -row[c2]
    return Quotient(ambient_dim, reps, q, field)


def right_inverse(m: Matrix, field: FieldSpec) -> Matrix:
    """X with m X = I; requires m surjective."""
    x = solve_matrix(m, field.eye(m.shape[0]), field)
    if x is None:
        raise ValueError("matrix is not surjective")
    return x


def left_inverse(m: Matrix, field: FieldSpec) -> Matrix:
    """Y with Y m = I; requires m injective."""
    y = solve_matrix(m.T.copy(), field.eye(m.shape[1]), field)
    if y is None:
        raise ValueError("matrix is not injective")
    return y.T.copy()


def block_diag(blocks: Sequence[Matrix], field: FieldSpec) -> Matrix:
    r = sum(b.shape[0] for b in blocks)
    c = sum(b.shape[1] for b in blocks)
    out = field.zeros(r, c)
    i = j = 0
    for b in blocks:
        out[i:i + b.shape[0], j:j + b.shape[1]] = b
        i += b.shape[0]
        j += b.shape[1]
    return out


# --------------------------------------------------------------- sparse

class SparseEchelon:
    """Incremental row echelon form for sparse rows over a field.

    The pivot of a row is its largest column index, so the pivot set is the
    set of leading monomials when columns are ordered by a monomial order.
    Rows are stored monic. Optional tags record each row as a combination of
    the inserted rows, which turns ``insert`` into a kernel finder.
    """

    def __init__(self, field: FieldSpec, track: bool = False):
        self.field = field
        self.rows: Dict[int, SparseVec] = {}
        self.tags: Dict[int, SparseVec] = {}
        self.track = track

    @property
    def rank(self) -> int:
        return len(self.rows)

    def pivots(self) -> List[int]:
        return sorted(self.rows)

    def _axpy(self, dst: SparseVec, src: SparseVec, c) -> None:
        p = self.field.p
        if p is None:
            for k, v in src.items():
                nv = dst.get(k, 0) + c * v
                if nv == 0:
                    dst.pop(k, None)
                else:
                    dst[k] = nv
        else:
            for k, v in src.items():
                nv = (dst.get(k, 0) + c * v) % p
                if nv == 0:
                    dst.pop(k, None)
                else:
                    dst[k] = nv

    def reduce(self, row: SparseVec, tag: Optional[SparseVec] = None
               ) -> Tuple[SparseVec, Optional[SparseVec]]:
        """Reduce until the leading column is not a pivot (a partial reduction)."""
        row = dict(row)
        neg = (lambda x: -x) if self.field.p is None else (lambda x: (-x) % self.field.p)
        while row:
            lead = max(row)
            prow = self.rows.get(lead)
            if prow is None:
                break
            c = neg(row[lead])
            self._axpy(row, prow, c)
            if tag is not None:
                self._axpy(tag, self.tags[lead], c)
        return row, tag

    def insert(self, row: SparseVec, tag: Optional[SparseVec] = None) -> Optional[SparseVec]:
        """Add a row. Returns None if it enlarged the span, else the tag of a
        combination of inserted rows that vanishes (empty dict without tracking)."""
        if self.track:
            tag = dict(tag) if tag is not None else {}
        else:
            tag = None
        row, tag = self.reduce(row, tag)
        if not row:
            return tag if tag is not None else {}
        lead = max(row)
        inv = self.field.inv(row[lead])
        p = self.field.p
        if p is None:
            row = {k: v * inv for k, v in row.items()}
            if tag is not None:
                tag = {k: v * inv for k, v in tag.items()}
        else:
            row = {k: v * inv % p for k, v in row.items()}
            if tag is not None:
                tag = {k: v * inv % p for k, v in tag.items()}
        self.rows[lead] = row
        if tag is not None:
            self.tags[lead] = tag
        return None

    def normal_forms(self) -> Dict[int, SparseVec]:
        """Fully reduce each pivot row, giving lead = -(tail) in normal coordinates.

        Returned mapping: pivot column -> dict of non-pivot columns with the
        coefficients expressing the pivot column's basis vector modulo the span.
        """
        done: Dict[int, SparseVec] = {}
        p = self.field.p
        for lead in sorted(self.rows):
            tail = {k: v for k, v in self.rows[lead].items() if k != lead}
            out: SparseVec = {}
            for k, v in tail.items():
                if k in done:
                    self._axpy(out, done[k], v)
                else:
                    nv = out.get(k, 0) + v
                    if p is not None:
                        nv %= p
                    if nv == 0:
                        out.pop(k, None)
                    else:
                        out[k] = nv
            neg = {k: (-v if p is None else (-v) % p) for k, v in out.items()}
            done[lead] = neg
        return done


def sparse_kernel(columns: Iterable[SparseVec], field: FieldSpec, count: int
                  ) -> List[SparseVec]:
    """Basis of the kernel of the matrix whose j-th column is ``columns[j]``.

    Each kernel vector is returned as a sparse dict over column indices.
    """
    ech = SparseEchelon(field, track=True)
    out = []
    for j, col in enumerate(columns):
        t = ech.insert(col, {j: field.scalar(1)})
        if t is not None:
            out.append(t)
    return out


def sparse_rank(rows: Iterable[SparseVec], field: FieldSpec) -> int:
    ech = SparseEchelon(field)
    for r in rows:
        ech.insert(r)
    return ech.rank


def sparse_to_dense(vec: SparseVec, length: int, field: FieldSpec) -> Vector:
    v = field.zeros(length)
    for k, x in vec.items():
        v[k] = x
    return v


def dense_to_sparse(v: Vector) -> SparseVec:
    return {int(i): v[i] for i in range(len(v)) if v[i] != 0}
