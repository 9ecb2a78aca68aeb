"""Integral symmetric bilinear forms: nullity splitting and diagonalization.

The splitting step finds a unimodular congruence carrying a symmetric
integer matrix to a block sum of a rationally invertible part and a zero
block, using a column Hermite reduction whose zero columns span the kernel
as a direct summand.  The recognition step decides whether a positive
definite unimodular form is congruent to the identity by enumerating
vectors of norm one (the search is finite by definiteness), splitting one
off, and recursing.  Every returned transform is verified by replay.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Optional

Matrix = list  # list of list of int


class LatticeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# integer matrix helpers

def mat_copy(m) -> Matrix:
    return [list(row) for row in m]


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def transpose(m) -> Matrix:
    return [list(col) for col in zip(*m)] if m else []


def mat_mul(a, b) -> Matrix:
    if not a or not b:
        return []
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def congruence(q, p) -> Matrix:
    """p^T q p."""
    return mat_mul(transpose(p), mat_mul(q, p))


def is_symmetric(q) -> bool:
    n = len(q)
    return all(len(row) == n for row in q) and \
        all(q[i][j] == q[j][i] for i in range(n) for j in range(n))


def det(m) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(m)
    if n == 0:
        return 1
    a = mat_copy(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def is_positive_definite(q) -> bool:
    """Leading principal minors all positive."""
    n = len(q)
    return all(det([row[: k + 1] for row in q[: k + 1]]) > 0 for k in range(n))


def is_unimodular(m) -> bool:
    return abs(det(m)) == 1


# ---------------------------------------------------------------------------
# the tracked matrix type

@dataclass(frozen=True)
class SymIntMatrix:
    """Symmetric integer matrix with its congruence-transform history."""

    matrix: tuple
    origin: tuple
    log: tuple = ()

    @classmethod
    def from_rows(cls, rows) -> "SymIntMatrix":
        mat = tuple(tuple(int(x) for x in row) for row in rows)
        if not is_symmetric([list(r) for r in mat]):
            raise LatticeError("matrix is not symmetric")
        return cls(matrix=mat, origin=mat, log=())

    @property
    def n(self) -> int:
        return len(self.matrix)

    def rows(self) -> Matrix:
        return [list(r) for r in self.matrix]

    def apply(self, p) -> "SymIntMatrix":
        """Congruence by a unimodular p, appended to the log."""
        if not is_unimodular(p):
            raise LatticeError("transform is not unimodular")
        new = congruence(self.rows(), p)
        return SymIntMatrix(
            matrix=tuple(tuple(r) for r in new),
            origin=self.origin,
            log=self.log + (tuple(tuple(r) for r in p),),
        )

    def replay(self) -> bool:
        """Re-apply the log to the origin and compare entry for entry."""
        cur = [list(r) for r in self.origin]
        for p in self.log:
            cur = congruence(cur, [list(r) for r in p])
        return cur == self.rows()

    def total_transform(self) -> Matrix:
        p = identity(self.n)
        for step in self.log:
            p = mat_mul(p, [list(r) for r in step])
        return p


# ---------------------------------------------------------------------------
# kernel splitting via column Hermite reduction

def _column_reduce(m) -> tuple:
    """Unimodular c with (m @ c) having independent nonzero columns first.

    Returns (h, c, rank): h = m @ c, the last n - rank columns of h zero.
    """
    n_rows = len(m)
    n_cols = len(m[0]) if m else 0
    h = mat_copy(m)
    c = identity(n_cols)

    def col(j):
        return [h[i][j] for i in range(n_rows)]

    def add_col(src, dst, k):
        for i in range(n_rows):
            h[i][dst] += k * h[i][src]
        for i in range(n_cols):
            c[i][dst] += k * c[i][src]

    def swap_col(a, b):
        for i in range(n_rows):
            h[i][a], h[i][b] = h[i][b], h[i][a]
        for i in range(n_cols):
            c[i][a], c[i][b] = c[i][b], c[i][a]

    rank = 0
    for row in range(n_rows):
        # euclidean reduction among active columns on this row
        while True:
            live = [j for j in range(rank, n_cols) if h[row][j] != 0]
            if not live:
                break
            piv = min(live, key=lambda j: (abs(h[row][j]), j))
            done = True
            for j in live:
                if j == piv:
                    continue
                qq = h[row][j] // h[row][piv]
                add_col(piv, j, -qq)
                if h[row][j] != 0:
                    done = False
            if done:
                if piv != rank:
                    swap_col(piv, rank)
                rank += 1
                break
    return h, c, rank


def nullity_split(q: SymIntMatrix) -> "SplitResult":
    """Unimodular congruence to block form diag(A, 0_k), k the nullity.

    The kernel columns of the reduction span the radical as a direct
    summand, so the transformed matrix is exactly block diagonal with an
    (n-k) x (n-k) block invertible over the rationals.
    """
    if not is_symmetric(q.rows()):
        raise LatticeError("matrix is not symmetric")
    n = q.n
    if n == 0:
        return SplitResult(original=q, transformed=q, transform=identity(0),
                           a_block=[], nullity=0)
    _, c, rank = _column_reduce(q.rows())
    k = n - rank
    result = q.apply(c)
    mat = result.rows()
    a_block = [row[:rank] for row in mat[:rank]]
    for i in range(n):
        for j in range(n):
            if (i >= rank or j >= rank) and mat[i][j] != 0:
                raise LatticeError("kernel splitting failed to zero the radical block")
    if rank and det(a_block) == 0:
        raise LatticeError("split block is not invertible over the rationals")
    return SplitResult(original=q, transformed=result, transform=c,
                       a_block=a_block, nullity=k)


@dataclass(frozen=True)
class SplitResult:
    original: SymIntMatrix
    transformed: SymIntMatrix
    transform: Matrix
    a_block: Matrix
    nullity: int

    @property
    def rank(self) -> int:
        return self.original.n - self.nullity


# ---------------------------------------------------------------------------
# norm-one vectors and diagonalization

def _ldl(a) -> tuple:
    """a = L D L^T with unit lower triangular L, positive diagonal D (exact)."""
    n = len(a)
    L = [[Fraction(0)] * n for _ in range(n)]
    D = [Fraction(0)] * n
    for j in range(n):
        s = Fraction(a[j][j])
        for k in range(j):
            s -= L[j][k] * L[j][k] * D[k]
        if s <= 0:
            raise LatticeError("form is not positive definite")
        D[j] = s
        L[j][j] = Fraction(1)
        for i in range(j + 1, n):
            t = Fraction(a[i][j])
            for k in range(j):
                t -= L[i][k] * L[j][k] * D[k]
            L[i][j] = t / D[j]
    return L, D


def _floor_sqrt(f: Fraction) -> int:
    if f < 0:
        return -1
    return isqrt(f.numerator * f.denominator) // f.denominator


def norm_one_vector(a) -> Optional[list]:
    """A vector of norm one for a positive definite form, or None.

    Exhaustive over the ellipsoid Q(x) <= 1 via the exact LDL bound, so a
    None answer certifies that no norm-one vector exists.
    """
    n = len(a)
    if n == 0:
        return None
    L, D = _ldl(a)

    found: list = []

    def descend(i: int, budget: Fraction, tail: list) -> bool:
        if i < 0:
            if budget == 0 and any(tail):
                found.extend(tail)
                return True
            return False
        center = Fraction(0)
        for j in range(i + 1, n):
            center += L[j][i] * tail[j - i - 1]
        radius2 = budget / D[i]
        r = _floor_sqrt(radius2)
        lo = -center - r - 1
        hi = -center + r + 1
        x = int(lo) if lo.denominator == 1 else (lo.numerator // lo.denominator)
        while x <= hi:
            y = Fraction(x) + center
            used = D[i] * y * y
            if used <= budget:
                if descend(i - 1, budget - used, [x] + tail):
                    return True
            x += 1
        return False

    if descend(n - 1, Fraction(1), []):
        return found
    return None


def _extend_primitive(v) -> Matrix:
    """Unimodular s with s e_0 = v, for a primitive integer vector v."""
    n = len(v)
    s = identity(n)
    w = list(v)
    # invariant: s @ w == v
    while True:
        nz = [i for i in range(n) if w[i] != 0]
        if len(nz) <= 1:
            break
        i, j = sorted(nz, key=lambda t: abs(w[t]))[:2]
        qq = w[j] // w[i]
        w[j] -= qq * w[i]
        for r in range(n):
            s[r][i] += qq * s[r][j]
    k = next(i for i in range(n) if w[i] != 0)
    if w[k] < 0:
        w[k] = -w[k]
        for r in range(n):
            s[r][k] = -s[r][k]
    if w[k] != 1:
        raise LatticeError("vector is not primitive")
    if k != 0:
        for r in range(n):
            s[r][0], s[r][k] = s[r][k], s[r][0]
    return s


def _embed(p, n: int, offset: int) -> Matrix:
    out = identity(n)
    m = len(p)
    for i in range(m):
        for j in range(m):
            out[offset + i][offset + j] = p[i][j]
    return out


def _diagonalize(a, offset: int, n: int) -> Optional[list]:
    """Transforms (in ambient size n) reducing a to the identity, or None."""
    m = len(a)
    if m == 0:
        return []
    v = norm_one_vector(a)
    if v is None:
        return None
    s = _extend_primitive(v)
    b = congruence(a, s)
    assert b[0][0] == 1
    t = identity(m)
    for j in range(1, m):
        t[0][j] = -b[0][j]
    c = congruence(b, t)
    rest = [row[1:] for row in c[1:]]
    sub = _diagonalize(rest, offset + 1, n)
    if sub is None:
        return None
    return [_embed(s, n, offset), _embed(t, n, offset)] + sub


@dataclass(frozen=True)
class DiagonalizationResult:
    standard: bool
    transformed: Optional[SymIntMatrix]   # carries the move log when standard
    witness: Optional[str]

    @property
    def transform(self) -> Optional[Matrix]:
        return None if self.transformed is None else self.transformed.total_transform()


def is_standard_diagonal(q: SymIntMatrix) -> DiagonalizationResult:
    """Decide congruence of a positive definite unimodular form to the identity.

    Splits off norm-one vectors recursively; a failure at any stage is a
    certificate (that stage's form has no norm-one vector at all).
    """
    a = q.rows()
    if not is_symmetric(a):
        raise LatticeError("matrix is not symmetric")
    if not is_positive_definite(a):
        raise LatticeError("form is not positive definite")
    if abs(det(a)) != 1:
        raise LatticeError("form is not unimodular")
    steps = _diagonalize(a, 0, q.n)
    if steps is None:
        return DiagonalizationResult(
            standard=False, transformed=None,
            witness="no vector of norm one exists (exhaustive ellipsoid search)")
    cur = q
    for p in steps:
        cur = cur.apply(p)
    if cur.rows() != identity(q.n) or not cur.replay():
        raise LatticeError("diagonalization replay failed")
    return DiagonalizationResult(standard=True, transformed=cur, witness=None)


# ---------------------------------------------------------------------------
# the splitting report

@dataclass(frozen=True)
class HandleSplitReport:
    """Outcome of splitting a linking form into diag(I_{n-k}, 0_k)."""

    original: SymIntMatrix
    nullity: int
    rank: int
    congruent: bool
    transform: Optional[Matrix]
    witness: Optional[str]
    verified: bool

    def to_json(self) -> dict:
        return {
            "size": self.original.n,
            "nullity": self.nullity,
            "rank": self.rank,
            "congruent_to_standard": self.congruent,
            "transform": self.transform,
            "witness": self.witness,
            "verified": self.verified,
        }


def handle_split_report(q: SymIntMatrix) -> HandleSplitReport:
    """Split off the radical, then decide diagonalizability of the core.

    A positive report comes with a single verified unimodular transform to
    diag(I_{n-k}, 0_k); a negative one carries the failing stage.
    """
    split = nullity_split(q)
    a = split.a_block
    k = split.nullity
    n = q.n
    rank = n - k

    def fail(reason: str) -> HandleSplitReport:
        return HandleSplitReport(original=q, nullity=k, rank=rank,
                                 congruent=False, transform=None,
                                 witness=reason, verified=False)

    if rank:
        if abs(det(a)) != 1:
            return fail(f"invertible block is not unimodular (det = {det(a)})")
        if not is_positive_definite(a):
            return fail("invertible block is not positive definite")
        result = is_standard_diagonal(SymIntMatrix.from_rows(a))
        if not result.standard:
            return fail(f"invertible block: {result.witness}")
        p_core = result.transformed.total_transform()
    else:
        p_core = []

    total = mat_mul(split.transform, _embed(p_core, n, 0)) if rank else split.transform
    target = [[1 if (i == j and i < rank) else 0 for j in range(n)] for i in range(n)]
    final = congruence(q.rows(), total)
    verified = final == target and is_unimodular(total)
    if not verified:
        raise LatticeError("handle splitting replay failed")
    return HandleSplitReport(original=q, nullity=k, rank=rank, congruent=True,
                             transform=total, witness=None, verified=True)


# ---------------------------------------------------------------------------
# test fixtures

def e8_gram_matrix() -> Matrix:
    """Gram matrix of the smallest exotic positive definite unimodular form."""
    adj = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7)]
    g = [[0] * 8 for _ in range(8)]
    for i in range(8):
        g[i][i] = 2
    for (i, j) in adj:
        g[i][j] = g[j][i] = -1
    return g


def random_unimodular(n: int, rng, moves: int = 20, cap: int = 10) -> Matrix:
    """Random unimodular matrix built from shear and swap moves.

    Entries are kept within ±cap by discarding shears that would blow up.
    """
    p = identity(n)
    done = 0
    attempts = 0
    while done < moves and attempts < 50 * moves:
        attempts += 1
        kind = rng.randrange(3)
        i, j = rng.randrange(n), rng.randrange(n)
        if kind == 0 and i != j:
            c = rng.choice([-2, -1, 1, 2])
            trial = [row[:] for row in p]
            for r in range(n):
                trial[r][j] += c * trial[r][i]
            if all(abs(x) <= cap for row in trial for x in row):
                p = trial
                done += 1
        elif kind == 1 and i != j:
            for r in range(n):
                p[r][i], p[r][j] = p[r][j], p[r][i]
            done += 1
        elif kind == 2:
            for r in range(n):
                p[r][i] = -p[r][i]
            done += 1
    assert is_unimodular(p)
    return p
