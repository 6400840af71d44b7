"""The free algebra k<X1..XN> and its quotient R by the ideal generated by sum Xi^2.

Words are tuples of letters in 1..N. Within one degree a word is encoded by
the integer whose base-N digits are its letters minus one, first letter most
significant; integer order is then deglex with X_N > ... > X_1.

R_n is built degreewise by linear algebra. Pivots are the largest words of
the ideal component, and the normal words (the basis of R_n) are the
non-pivot words, so no rewriting system is ever needed.
"""

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .exactla import FieldSpec, SparseEchelon, SparseVec, sparse_rank
from .report import Check, check

Word = Tuple[int, ...]
DIRECT_CAP = 20000


def word_index(word: Word, N: int) -> int:
    idx = 0
    for a in word:
        idx = idx * N + (a - 1)
    return idx


def index_word(idx: int, n: int, N: int) -> Word:
    letters = []
    for _ in range(n):
        idx, r = divmod(idx, N)
        letters.append(r + 1)
    return tuple(reversed(letters))


def recurrence_dims(N: int, n_max: int) -> List[int]:
    """r_0 = 1, r_1 = N, r_{n+1} = N r_n - r_{n-1}."""
    r = [1, N]
    while len(r) <= n_max:
        r.append(N * r[-1] - r[-2])
    return r[:n_max + 1]


# ------------------------------------------------------------ polynomials

class NCPoly:
    """A noncommutative polynomial: a finite map word -> nonzero scalar."""

    def __init__(self, N: int, terms: Optional[Dict[Word, object]] = None,
                 field: FieldSpec = FieldSpec.rationals()):
        self.N = N
        self.field = field
        self.terms: Dict[Word, object] = {}
        for w, c in (terms or {}).items():
            w = tuple(w)
            for a in w:
                if not 1 <= a <= N:
                    raise ValueError(f"letter X{a} out of range 1..{N}")
            c = field.scalar(c)
            if c != 0:
                self.terms[w] = c

    @classmethod
    def word(cls, w: Sequence[int], N: int, field: FieldSpec = FieldSpec.rationals()) -> "NCPoly":
        return cls(N, {tuple(w): 1}, field)

    @classmethod
    def relation(cls, N: int, field: FieldSpec = FieldSpec.rationals()) -> "NCPoly":
        return cls(N, {(i, i): 1 for i in range(1, N + 1)}, field)

    def _combine(self, other: "NCPoly", sign: int) -> "NCPoly":
        if other.N != self.N or other.field != self.field:
            raise ValueError("polynomials over different algebras")
        t = dict(self.terms)
        for w, c in other.terms.items():
            t[w] = self.field.scalar(t.get(w, 0) + sign * c)
        return NCPoly(self.N, t, self.field)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return NCPoly(self.N, {w: -c for w, c in self.terms.items()}, self.field)

    def __mul__(self, other):
        if isinstance(other, NCPoly):
            if other.N != self.N or other.field != self.field:
                raise ValueError("polynomials over different algebras")
            t: Dict[Word, object] = {}
            for u, a in self.terms.items():
                for v, b in other.terms.items():
                    t[u + v] = self.field.scalar(t.get(u + v, 0) + a * b)
            return NCPoly(self.N, t, self.field)
        c = self.field.scalar(other)
        return NCPoly(self.N, {w: a * c for w, a in self.terms.items()}, self.field)

    __rmul__ = __mul__

    def __eq__(self, other):
        return (isinstance(other, NCPoly) and self.N == other.N
                and self.field == other.field and self.terms == other.terms)

    def __hash__(self):
        return hash((self.N, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> List[int]:
        return sorted({len(w) for w in self.terms})

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    @property
    def degree(self) -> Optional[int]:
        d = self.degrees()
        return d[0] if len(d) == 1 else None

    def __repr__(self):
        return f"NCPoly({format_ncpoly(self)!r}, N={self.N})"

    def __str__(self):
        return format_ncpoly(self)


class NCPolySyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


def parse_ncpoly(text: str, N: int, field: FieldSpec = FieldSpec.rationals()) -> NCPoly:
    """Parse e.g. ``"X1*X2 - 3/2*X2^2"``. Whitespace is ignored."""
    # keep original positions for error messages
    toks = [(ch, i) for i, ch in enumerate(text) if not ch.isspace()]
    pos = 0
    end = len(text)

    def peek():
        return toks[pos][0] if pos < len(toks) else ""

    def where():
        return toks[pos][1] if pos < len(toks) else end

    def integer() -> int:
        nonlocal pos
        start = pos
        while pos < len(toks) and toks[pos][0].isdigit():
            pos += 1
        if pos == start:
            raise NCPolySyntaxError("expected integer", where())
        return int("".join(t[0] for t in toks[start:pos]))

    terms: Dict[Word, object] = {}
    if not toks:
        raise NCPolySyntaxError("empty polynomial", 0)
    first = True
    while pos < len(toks):
        sign = 1
        if peek() in "+-":
            sign = -1 if peek() == "-" else 1
            pos += 1
        elif not first:
            raise NCPolySyntaxError("expected '+' or '-'", where())
        first = False
        coef = Fraction(1)
        word: List[int] = []
        have_coef = False
        if peek().isdigit():
            coef = Fraction(integer())
            have_coef = True
            if peek() == "/":
                pos += 1
                den = integer()
                if den == 0:
                    raise NCPolySyntaxError("zero denominator", toks[pos - 1][1])
                coef /= den
            if peek() == "*":
                pos += 1
                if peek() != "X":
                    raise NCPolySyntaxError("expected factor after '*'", where())
        if peek() == "X":
            while True:
                if peek() != "X":
                    raise NCPolySyntaxError("expected factor X<k>", where())
                at = where()
                pos += 1
                k = integer()
                if not 1 <= k <= N:
                    raise NCPolySyntaxError(f"index X{k} out of range 1..{N}", at)
                e = 1
                if peek() == "^":
                    pos += 1
                    e = integer()
                word.extend([k] * e)
                if peek() == "*":
                    pos += 1
                    continue
                break
        elif not have_coef:
            raise NCPolySyntaxError("expected term", where())
        w = tuple(word)
        terms[w] = terms.get(w, 0) + sign * coef
    return NCPoly(N, terms, field)


def _format_word(w: Word) -> str:
    parts = []
    i = 0
    while i < len(w):
        j = i
        while j < len(w) and w[j] == w[i]:
            j += 1
        e = j - i
        parts.append(f"X{w[i]}" + (f"^{e}" if e > 1 else ""))
        i = j
    return "*".join(parts)


def format_ncpoly(p: NCPoly) -> str:
    """Printer inverse to parse_ncpoly; terms sorted by degree then deglex."""
    if not p.terms:
        return "0"
    out = []
    for w in sorted(p.terms, key=lambda w: (len(w), word_index(w, p.N))):
        c = Fraction(p.terms[w])
        neg = c < 0
        a = -c if neg else c
        cs = str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"
        if not w:
            body = cs
        elif a == 1:
            body = _format_word(w)
        else:
            body = f"{cs}*{_format_word(w)}"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


def ideal_component(N: int, n: int, field: FieldSpec = FieldSpec.rationals()) -> List[NCPoly]:
    """Spanning set {w r w'} of the degree-n part of the ideal, r = sum Xi^2."""
    if n < 2:
        raise ValueError("the ideal has no elements below degree 2")
    out = []
    for k in range(n - 1):
        for a in range(N ** k):
            pre = index_word(a, k, N)
            for b in range(N ** (n - 2 - k)):
                suf = index_word(b, n - 2 - k, N)
                out.append(NCPoly(N, {pre + (i, i) + suf: 1 for i in range(1, N + 1)}, field))
    return out


def _ideal_rows(N: int, n: int) -> Iterable[SparseVec]:
    for k in range(n - 1):
        tail = N ** (n - 2 - k)
        for a in range(N ** k):
            for b in range(tail):
                yield {((a * N + i) * N + i) * tail + b: 1 for i in range(N)}


# ----------------------------------------------------------------- slices

@dataclass
class GradedSlice:
    """Degree-n component R_n: normal words plus a reduction map to their span."""

    N: int
    degree: int
    field: FieldSpec
    normal_words: List[Word]
    method: str
    _positions: Dict[int, int] = dc_field(repr=False)
    _pivot_nf: Dict[int, SparseVec] = dc_field(repr=False)
    _prev: Optional["GradedSlice"] = dc_field(default=None, repr=False)
    _cache: Dict[Word, SparseVec] = dc_field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return len(self.normal_words)

    def position(self, word: Word) -> Optional[int]:
        """Index of a normal word in the basis, None if the word is not normal."""
        if len(word) != self.degree:
            raise ValueError("word of wrong degree")
        return self._positions.get(word_index(word, self.N))

    def coords(self, word: Word) -> SparseVec:
        """Coordinates of a degree-n word in the normal-word basis (sparse)."""
        word = tuple(word)
        if len(word) != self.degree:
            raise ValueError(f"word of degree {len(word)} given to slice of degree {self.degree}")
        hit = self._cache.get(word)
        if hit is not None:
            return hit
        if self.degree == 0:
            out = {0: self.field.scalar(1)}
        elif self.method == "direct":
            idx = word_index(word, self.N)
            pos = self._positions.get(idx)
            out = {pos: self.field.scalar(1)} if pos is not None else self._pivot_nf[idx]
        else:
            prev = self._prev
            sub = prev.coords(word[1:])
            base = (word[0] - 1) * prev.dim
            out = {}
            p = self.field.p
            for q, c in sub.items():
                key = base + q
                pos = self._positions.get(key)
                contrib = {pos: 1} if pos is not None else self._pivot_nf[key]
                for k, v in contrib.items():
                    nv = out.get(k, 0) + c * v
                    if p is not None:
                        nv %= p
                    if nv == 0:
                        out.pop(k, None)
                    else:
                        out[k] = nv
        if len(self._cache) < 200000:
            self._cache[word] = out
        return out

    def reduce(self, combo: Dict[Word, object]) -> SparseVec:
        """Linear reduction of a combination of degree-n words."""
        out: SparseVec = {}
        p = self.field.p
        for w, c in combo.items():
            c = self.field.scalar(c)
            for k, v in self.coords(w).items():
                nv = out.get(k, 0) + c * v
                if p is not None:
                    nv %= p
                if nv == 0:
                    out.pop(k, None)
                else:
                    out[k] = nv
        return out

    def dense(self, vec: SparseVec) -> np.ndarray:
        v = self.field.zeros(self.dim)
        for k, x in vec.items():
            v[k] = x
        return v


def _direct_slice(N: int, n: int, field: FieldSpec) -> GradedSlice:
    if n < 2:
        words = [index_word(i, n, N) for i in range(N ** n)]
        return GradedSlice(N, n, field, words, "direct", {i: i for i in range(N ** n)}, {})
    ech = SparseEchelon(field)
    one = field.scalar(1)
    for row in _ideal_rows(N, n):
        ech.insert({k: one for k in row})
    nf = ech.normal_forms()
    normal = [i for i in range(N ** n) if i not in nf]
    positions = {idx: j for j, idx in enumerate(normal)}
    pivot_nf = {lead: {positions[k]: v for k, v in tail.items()} for lead, tail in nf.items()}
    return GradedSlice(N, n, field, [index_word(i, n, N) for i in normal], "direct",
                       positions, pivot_nf)


def _incremental_slice(prev: GradedSlice, prev2: Optional[GradedSlice]) -> GradedSlice:
    """R_{n+1} = (V (x) R_n) / Psi(R_{n-1}) with Psi(u) = sum_i Xi (x) Xi u."""
    N, field, n = prev.N, prev.field, prev.degree
    ech = SparseEchelon(field)
    if prev2 is not None:
        for u in prev2.normal_words:
            row: SparseVec = {}
            for i in range(1, N + 1):
                base = (i - 1) * prev.dim
                for q, c in prev.coords((i,) + u).items():
                    row[base + q] = c
            ech.insert(row)
    nf = ech.normal_forms()
    total = N * prev.dim
    normal_pairs = [k for k in range(total) if k not in nf]
    positions = {k: j for j, k in enumerate(normal_pairs)}
    pivot_nf = {lead: {positions[k]: v for k, v in tail.items()} for lead, tail in nf.items()}
    words = []
    for k in normal_pairs:
        i, q = divmod(k, prev.dim)
        words.append((i + 1,) + prev.normal_words[q])
    return GradedSlice(N, n + 1, field, words, "incremental", positions, pivot_nf, _prev=prev)


def graded_slice(N: int, n: int, field: FieldSpec = FieldSpec.prime(),
                 method: str = "direct") -> GradedSlice:
    """R_n on its own. ``method='incremental'`` builds all lower degrees first."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if N < 2:
        raise ValueError("N must be at least 2")
    if method == "direct":
        return _direct_slice(N, n, field)
    return build_slices(N, n, field, method=method)[n]


def build_slices(N: int, n_max: int, field: FieldSpec = FieldSpec.prime(),
                 method: str = "auto", direct_cap: int = DIRECT_CAP) -> List[GradedSlice]:
    """Slices R_0..R_{n_max}.

    ``auto`` eliminates directly while N^n <= direct_cap and switches to the
    incremental construction above that.
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    if method not in ("auto", "direct", "incremental"):
        raise ValueError(f"unknown method {method!r}")
    out: List[GradedSlice] = []
    for n in range(n_max + 1):
        direct = method == "direct" or (method == "auto" and N ** n <= direct_cap)
        if n == 0 or direct:
            out.append(_direct_slice(N, n, field))
        else:
            out.append(_incremental_slice(out[n - 1], out[n - 2] if n >= 2 else None))
    return out


# ------------------------------------------------------------- operations

def normal_form(p: NCPoly, slices: Sequence[GradedSlice]) -> np.ndarray:
    if p.is_zero():
        raise ValueError("zero polynomial has no degree; use the slice of the intended degree")
    if not p.is_homogeneous():
        raise ValueError("normal_form needs a homogeneous polynomial")
    n = p.degree
    if n >= len(slices):
        raise ValueError(f"no slice for degree {n}")
    s = slices[n]
    if p.field != s.field:
        raise ValueError("polynomial and slice over different fields")
    return s.dense(s.reduce(p.terms))


def multiply(a: np.ndarray, b: np.ndarray, slices: Sequence[GradedSlice]) -> np.ndarray:
    """Product in R of elements given by dense coordinates in R_m and R_n."""
    m = _degree_of(a, slices)
    n = _degree_of(b, slices)
    return multiply_graded(a, m, b, n, slices)


def _degree_of(v: np.ndarray, slices: Sequence[GradedSlice]) -> int:
    # r_n is strictly increasing for N >= 2, so the length fixes the degree
    for s in slices:
        if s.dim == len(v):
            return s.degree
    raise ValueError(f"no slice of dimension {len(v)}")


def multiply_graded(a: np.ndarray, m: int, b: np.ndarray, n: int,
                    slices: Sequence[GradedSlice]) -> np.ndarray:
    if m + n >= len(slices):
        raise ValueError(f"product needs the slice of degree {m + n}")
    sa, sb, sc = slices[m], slices[n], slices[m + n]
    if len(a) != sa.dim or len(b) != sb.dim:
        raise ValueError("coordinate vectors do not match slice dimensions")
    field = sc.field
    out: SparseVec = {}
    p = field.p
    for i in range(sa.dim):
        if a[i] == 0:
            continue
        u = sa.normal_words[i]
        for j in range(sb.dim):
            if b[j] == 0:
                continue
            c = a[i] * b[j]
            for k, v in sc.coords(u + sb.normal_words[j]).items():
                nv = out.get(k, 0) + c * v
                if p is not None:
                    nv %= p
                if nv == 0:
                    out.pop(k, None)
                else:
                    out[k] = nv
    return sc.dense(out)


def hilbert(N: int, n_max: int, field: FieldSpec = FieldSpec.prime(),
            method: str = "auto") -> List[int]:
    """dim R_0..R_{n_max} computed by elimination (not by the recurrence)."""
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    return [s.dim for s in build_slices(N, n_max, field, method=method)]


def left_mult_columns(slices: Sequence[GradedSlice], n: int) -> List[List[SparseVec]]:
    """cols[i][q] = coordinates of X_{i+1} * (q-th normal word of R_n) in R_{n+1}."""
    s, t = slices[n], slices[n + 1]
    return [[t.coords((i,) + w) for w in s.normal_words] for i in range(1, s.N + 1)]


def check_lemma_exact_sequence(N: int, n: int, slices: Sequence[GradedSlice]) -> Check:
    """0 -> R_{n-1} -Psi-> R_1 (x) R_n -Phi-> R_{n+1} -> 0 is exact."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if len(slices) <= n + 1:
        raise ValueError(f"slices up to degree {n + 1} required")
    field = slices[0].field
    prev, mid, nxt = slices[n - 1], slices[n], slices[n + 1]
    # Phi(Xi (x) w) = Xi w; the column for (i, q) sits at index (i-1)*r_n + q
    phi_cols = [nxt.coords((i,) + w) for i in range(1, N + 1) for w in mid.normal_words]
    psi_cols = []
    for u in prev.normal_words:
        col: SparseVec = {}
        for i in range(1, N + 1):
            for q, c in mid.coords((i,) + u).items():
                col[(i - 1) * mid.dim + q] = c
        psi_cols.append(col)
    rank_phi = sparse_rank(phi_cols, field)
    rank_psi = sparse_rank(psi_cols, field)
    # Phi o Psi = 0
    p = field.p
    composite_zero = True
    for col in psi_cols:
        acc: SparseVec = {}
        for k, c in col.items():
            for r, v in phi_cols[k].items():
                nv = acc.get(r, 0) + c * v
                if p is not None:
                    nv %= p
                if nv == 0:
                    acc.pop(r, None)
                else:
                    acc[r] = nv
        if acc:
            composite_zero = False
            break
    psi_inj = rank_psi == prev.dim
    phi_surj = rank_phi == nxt.dim
    mid_exact = composite_zero and rank_phi + rank_psi == N * mid.dim
    dims_ok = N * mid.dim == prev.dim + nxt.dim
    return check(f"exact-sequence N={N} n={n}", "koszul-exact-sequence",
                 psi_inj and phi_surj and mid_exact and dims_ok,
                 r_prev=prev.dim, r_n=mid.dim, r_next=nxt.dim,
                 rank_psi=rank_psi, rank_phi=rank_phi,
                 psi_injective=psi_inj, phi_surjective=phi_surj, middle_exact=mid_exact)
