"""Exact linear algebra over F2[U] for graded chain complexes.

Everything in this package lives over the polynomial ring F2[U] with U of
degree -2.  All matrices that occur are grading homogeneous, which forces
every nonzero slot to be a single monomial U^k whose exponent is determined
by the row and column gradings together with the degree shift of the map.
A matrix is therefore stored as a sparse 0/1 occupancy pattern plus grading
data; Gaussian elimination with a minimal-exponent pivot rule keeps every
multiplier in F2[U] and never leaves monomial land.

Polynomials in U are encoded as Python ints: bit k is the coefficient of
U^k.  Addition is XOR and multiplication by U^k is a left shift.  Vectors
are dicts from basis index to such an int.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

Grading = Union[int, Fraction]
Poly = int
Vector = dict[int, Poly]


class HomogeneityError(ValueError):
    """A matrix slot does not carry the U-power forced by the gradings."""


class MalformedComplexError(ValueError):
    """The differential does not square to zero, or homology is not as required."""


class NotAChainMapError(ValueError):
    """A map offered as a chain map fails f∘d = d∘f."""


class NotACycleError(ValueError):
    """A vector offered as a cycle is not killed by the differential."""


# ---------------------------------------------------------------------------
# polynomial helpers (int bitmask encoding)

def poly_mul(a: Poly, b: Poly) -> Poly:
    """Carry-less product of two F2[U] polynomials."""
    out = 0
    while b:
        low = b & -b
        out ^= a << (low.bit_length() - 1)
        b ^= low
    return out


def poly_divmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    """Quotient and remainder of F2[U] polynomials; b must be nonzero."""
    if b == 0:
        raise ZeroDivisionError("division by the zero polynomial")
    q = 0
    db = b.bit_length()
    while a.bit_length() >= db:
        shift = a.bit_length() - db
        q ^= 1 << shift
        a ^= b << shift
    return q, a


def vec_iadd(acc: Vector, other: Mapping[int, Poly], shift: int = 0) -> None:
    """acc += U^shift * other, in place."""
    for i, p in other.items():
        v = acc.get(i, 0) ^ (p << shift)
        if v:
            acc[i] = v
        else:
            acc.pop(i, None)


def vec_scale(v: Mapping[int, Poly], power: int) -> Vector:
    return {i: p << power for i, p in v.items()}


# ---------------------------------------------------------------------------
# grading-homogeneous monomial matrices

def _slot_power(row_g: Grading, col_g: Grading, shift: Grading) -> int:
    """U-exponent forced on a slot by gradings; raises if not a nonnegative int."""
    num = row_g - col_g - shift
    if isinstance(num, Fraction):
        if num.denominator != 1:
            raise HomogeneityError(f"fractional grading difference {num}")
        num = num.numerator
    if num % 2 != 0:
        raise HomogeneityError(f"odd grading difference {num}")
    k = num // 2
    if k < 0:
        raise HomogeneityError(f"negative U-power {k} forced by gradings")
    return k


@dataclass(frozen=True)
class MonomialMatrix:
    """A grading-homogeneous matrix over F2[U].

    Represents the map sending column basis vector j to the sum of
    U^power(i, j) * (row basis vector i) over occupied slots (i, j), where
    power(i, j) is forced by ``row grading = col grading + shift - 2*power``.
    ``shift`` is -1 for differentials and even for chain maps.
    """

    row_labels: tuple
    col_labels: tuple
    row_gradings: tuple
    col_gradings: tuple
    shift: Grading
    entries: frozenset

    def __post_init__(self):
        for (i, j) in self.entries:
            _slot_power(self.row_gradings[i], self.col_gradings[j], self.shift)

    @property
    def n_rows(self) -> int:
        return len(self.row_labels)

    @property
    def n_cols(self) -> int:
        return len(self.col_labels)

    def power(self, i: int, j: int) -> int:
        return _slot_power(self.row_gradings[i], self.col_gradings[j], self.shift)

    def is_zero(self) -> bool:
        return not self.entries

    @classmethod
    def identity(cls, labels: Sequence, gradings: Sequence[Grading]) -> "MonomialMatrix":
        n = len(labels)
        return cls(
            row_labels=tuple(labels),
            col_labels=tuple(labels),
            row_gradings=tuple(gradings),
            col_gradings=tuple(gradings),
            shift=0,
            entries=frozenset((i, i) for i in range(n)),
        )

    def apply(self, vec: Mapping[int, Poly]) -> Vector:
        """Image of a column-space vector."""
        out: Vector = {}
        for (i, j) in self.entries:
            p = vec.get(j, 0)
            if p:
                v = out.get(i, 0) ^ (p << self.power(i, j))
                if v:
                    out[i] = v
                else:
                    del out[i]
        return out

    def compose(self, other: "MonomialMatrix") -> "MonomialMatrix":
        """self ∘ other (apply ``other`` first)."""
        if self.col_gradings != other.row_gradings:
            raise ValueError("composition spaces do not match")
        by_mid: dict[int, list[int]] = {}
        for (j, k) in other.entries:
            by_mid.setdefault(j, []).append(k)
        slots: set[tuple[int, int]] = set()
        for (i, j) in self.entries:
            for k in by_mid.get(j, ()):
                slots ^= {(i, k)}
        return MonomialMatrix(
            row_labels=self.row_labels,
            col_labels=other.col_labels,
            row_gradings=self.row_gradings,
            col_gradings=other.col_gradings,
            shift=self.shift + other.shift,
            entries=frozenset(slots),
        )

    def column(self, j: int) -> Vector:
        return {i: 1 << self.power(i, j) for (i, jj) in self.entries if jj == j}


# ---------------------------------------------------------------------------
# Smith normal form

class _Pattern:
    """Mutable 0/1 occupancy pattern with row/column indexes."""

    __slots__ = ("rows", "cols")

    def __init__(self):
        self.rows: dict[int, set[int]] = {}
        self.cols: dict[int, set[int]] = {}

    @classmethod
    def from_entries(cls, entries: Iterable[tuple[int, int]]) -> "_Pattern":
        p = cls()
        for (i, j) in entries:
            p.toggle(i, j)
        return p

    @classmethod
    def eye(cls, n: int) -> "_Pattern":
        p = cls()
        for i in range(n):
            p.toggle(i, i)
        return p

    def toggle(self, i: int, j: int) -> None:
        row = self.rows.setdefault(i, set())
        if j in row:
            row.discard(j)
            if not row:
                del self.rows[i]
            col = self.cols[j]
            col.discard(i)
            if not col:
                del self.cols[j]
        else:
            row.add(j)
            self.cols.setdefault(j, set()).add(i)

    def add_row(self, src: int, dst: int) -> None:
        """Row dst += row src (over F2 patterns)."""
        for j in list(self.rows.get(src, ())):
            self.toggle(dst, j)

    def add_col(self, src: int, dst: int) -> None:
        for i in list(self.cols.get(src, ())):
            self.toggle(i, dst)

    def entries(self) -> frozenset:
        return frozenset((i, j) for i, row in self.rows.items() for j in row)


@dataclass(frozen=True)
class SmithForm:
    """Result of the graded Smith reduction R @ m @ C = diagonal."""

    matrix: MonomialMatrix
    pivots: tuple  # (row, col, power) in elimination order; powers ascend
    row_t: MonomialMatrix
    row_t_inv: MonomialMatrix
    col_t: MonomialMatrix
    col_t_inv: MonomialMatrix

    @property
    def diagonal_powers(self) -> tuple[int, ...]:
        return tuple(k for (_, _, k) in self.pivots)

    @property
    def pivot_rows(self) -> frozenset:
        return frozenset(r for (r, _, _) in self.pivots)

    @property
    def pivot_cols(self) -> frozenset:
        return frozenset(c for (_, c, _) in self.pivots)

    def diagonal_matrix(self) -> MonomialMatrix:
        return MonomialMatrix(
            row_labels=self.matrix.row_labels,
            col_labels=self.matrix.col_labels,
            row_gradings=self.matrix.row_gradings,
            col_gradings=self.matrix.col_gradings,
            shift=self.matrix.shift,
            entries=frozenset((r, c) for (r, c, _) in self.pivots),
        )

    def verify(self) -> bool:
        """Replay the transforms and compare with the recorded diagonal."""
        replayed = self.row_t.compose(self.matrix).compose(self.col_t)
        if replayed.entries != self.diagonal_matrix().entries:
            return False
        n = self.matrix.n_rows
        m = self.matrix.n_cols
        eye_r = frozenset((i, i) for i in range(n))
        eye_c = frozenset((i, i) for i in range(m))
        return (self.row_t.compose(self.row_t_inv).entries == eye_r
                and self.col_t.compose(self.col_t_inv).entries == eye_c)


def snf(m: MonomialMatrix) -> SmithForm:
    """Grading-compatible Smith normal form over F2[U].

    The pivot is always a slot of minimal U-power (ties broken by row label
    then column label) so every elimination multiplier has a nonnegative
    U-power; transforms stay invertible over F2[U] and grading homogeneous.
    """
    work = _Pattern.from_entries(m.entries)
    row_t = _Pattern.eye(m.n_rows)
    row_t_inv = _Pattern.eye(m.n_rows)
    col_t = _Pattern.eye(m.n_cols)
    col_t_inv = _Pattern.eye(m.n_cols)
    pivots = []

    def slot_key(slot):
        i, j = slot
        return (m.power(i, j), m.row_labels[i], m.col_labels[j])

    while work.rows:
        r, c = min(
            ((i, j) for i, row in work.rows.items() for j in row),
            key=slot_key,
        )
        k = m.power(r, c)
        # clear the pivot column: row ops never touch row r
        for r2 in list(work.cols.get(c, ())):
            if r2 == r:
                continue
            work.add_row(r, r2)
            row_t.add_row(r, r2)          # R <- E @ R
            row_t_inv.add_col(r2, r)      # R^-1 <- R^-1 @ E
        # clear the pivot row: column c now holds only the pivot
        for c2 in list(work.rows.get(r, ())):
            if c2 == c:
                continue
            work.add_col(c, c2)
            col_t.add_col(c, c2)          # C <- C @ F
            col_t_inv.add_row(c2, c)      # C^-1 <- F @ C^-1
        work.toggle(r, c)
        pivots.append((r, c, k))

    def _mat(pat: _Pattern, labels, gradings) -> MonomialMatrix:
        return MonomialMatrix(
            row_labels=labels, col_labels=labels,
            row_gradings=gradings, col_gradings=gradings,
            shift=0, entries=pat.entries(),
        )

    return SmithForm(
        matrix=m,
        pivots=tuple(pivots),
        row_t=_mat(row_t, m.row_labels, m.row_gradings),
        row_t_inv=_mat(row_t_inv, m.row_labels, m.row_gradings),
        col_t=_mat(col_t, m.col_labels, m.col_gradings),
        col_t_inv=_mat(col_t_inv, m.col_labels, m.col_gradings),
    )


# ---------------------------------------------------------------------------
# graded modules and homology

@dataclass(frozen=True)
class GradedModule:
    """Finitely generated graded F2[U]-module in canonical form.

    ``free`` lists the gradings of the free summands, ``torsion`` lists
    (grading, order) pairs where order k means a cyclic summand killed by
    U^k.  Both are kept sorted so equality is structural.
    """

    free: tuple
    torsion: tuple

    def __post_init__(self):
        if any(k < 1 for (_, k) in self.torsion):
            raise ValueError("torsion orders must be >= 1")
        object.__setattr__(self, "free", tuple(sorted(self.free)))
        object.__setattr__(self, "torsion", tuple(sorted(self.torsion)))

    @property
    def free_rank(self) -> int:
        return len(self.free)

    def is_zero(self) -> bool:
        return not self.free and not self.torsion

    def f2_dimension(self, degree: Grading) -> int:
        """Dimension over F2 of the homogeneous piece in one degree."""
        dim = 0
        for g in self.free:
            diff = g - degree
            if diff >= 0 and diff % 2 == 0:
                dim += 1
        for (g, k) in self.torsion:
            diff = g - degree
            if diff >= 0 and diff % 2 == 0 and diff // 2 < k:
                dim += 1
        return dim


@dataclass(frozen=True)
class Summand:
    kind: str            # "free" or "torsion"
    grading: Grading
    order: int           # 0 for free summands
    rep: tuple           # homology representative, tuple of (index, poly)

    def rep_vector(self) -> Vector:
        return dict(self.rep)


@dataclass(frozen=True)
class HomologyPresentation:
    """Homology of a complex with full change-of-basis bookkeeping.

    Carries the Smith reduction of the differential, the cycle basis, the
    presentation of homology in that basis, and chosen representatives, so
    that exact class membership questions can be answered afterwards.
    """

    differential: MonomialMatrix
    smith: SmithForm
    ker_indices: tuple          # column indices spanning the cycles
    presentation: MonomialMatrix  # boundary generators in the cycle basis
    pres_smith: SmithForm
    summands: tuple             # of Summand, in presentation row order
    module: GradedModule

    def is_cycle(self, z: Mapping[int, Poly]) -> bool:
        return not self.differential.apply(z)

    def _ker_coords(self, z: Mapping[int, Poly]) -> Vector:
        y = self.smith.col_t_inv.apply(z)
        pos = {c: idx for idx, c in enumerate(self.ker_indices)}
        coords: Vector = {}
        for c, p in y.items():
            if c not in pos:
                raise NotACycleError("vector is not in the cycle submodule")
            coords[pos[c]] = p
        return coords

    def class_coords(self, z: Mapping[int, Poly]) -> dict[int, Poly]:
        """Coordinates of the class [z] on the summands, reduced exactly.

        Free coordinates are exact polynomials; a torsion coordinate of
        order k is reduced mod U^k.  Keys index into ``summands``.
        """
        if not self.is_cycle(z):
            raise NotACycleError("not a cycle")
        u = self.pres_smith.row_t.apply(self._ker_coords(z))
        rows = _summand_rows(self)
        out: dict[int, Poly] = {}
        for idx, s in enumerate(self.summands):
            p = u.get(rows[idx], 0)
            if s.kind == "torsion":
                p &= (1 << s.order) - 1
            if p:
                out[idx] = p
        return out

    def class_is_zero(self, z: Mapping[int, Poly]) -> bool:
        """Exact boundary test for a cycle z."""
        return not self.class_coords(z)

    def free_summand_indices(self) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.summands) if s.kind == "free")


def _summand_rows(pres: HomologyPresentation) -> dict[int, int]:
    """Map summand position -> presentation row index."""
    pivot_order = {r: k for (r, _, k) in pres.pres_smith.pivots}
    rows = {}
    pos = 0
    for row in range(pres.presentation.n_rows):
        k = pivot_order.get(row)
        if k == 0:
            continue
        rows[pos] = row
        pos += 1
    return rows


def homology(d: MonomialMatrix, *, check: bool = True) -> tuple[GradedModule, HomologyPresentation]:
    """Homology of a squared-zero differential, with basis tracking.

    A U^0 diagonal entry of the Smith form cancels a pair of generators, a
    U^k entry with k >= 1 contributes torsion of order k, and untouched
    basis vectors contribute free summands.
    """
    if d.row_labels != d.col_labels or d.row_gradings != d.col_gradings:
        raise MalformedComplexError("differential must be an endomorphism matrix")
    if d.shift != -1:
        raise MalformedComplexError("differential must have degree -1")
    if check and not d.compose(d).is_zero():
        raise MalformedComplexError("differential does not square to zero")

    s1 = snf(d)
    pivot_cols = s1.pivot_cols
    ker_indices = tuple(j for j in range(d.n_cols) if j not in pivot_cols)
    ker_pos = {c: idx for idx, c in enumerate(ker_indices)}

    # boundary generators: d(col_t e_{c_i}) = U^{k_i} * (row_t_inv e_{r_i})
    pres_entries = set()
    pres_col_gradings = []
    pres_col_labels = []
    for (r, c, k) in s1.pivots:
        f = s1.row_t_inv.column(r)
        coords = s1.col_t_inv.apply(f)    # cycle coordinates in the col_t basis
        col_idx = len(pres_col_labels)
        pres_col_labels.append(("b", d.row_labels[r]))
        pres_col_gradings.append(d.row_gradings[r] - 2 * k)
        for i, p in coords.items():
            if i not in ker_pos:
                raise MalformedComplexError("boundary generator is not a cycle")
            p <<= k
            assert p and (p & (p - 1)) == 0, "non-monomial coordinate"
            want = _slot_power(d.col_gradings[i], pres_col_gradings[col_idx], 0)
            assert p.bit_length() - 1 == want, "coordinate power mismatch"
            pres_entries.add((ker_pos[i], col_idx))

    presentation = MonomialMatrix(
        row_labels=tuple(d.col_labels[j] for j in ker_indices),
        col_labels=tuple(pres_col_labels),
        row_gradings=tuple(d.col_gradings[j] for j in ker_indices),
        col_gradings=tuple(pres_col_gradings),
        shift=0,
        entries=frozenset(pres_entries),
    )
    s2 = snf(presentation)
    pivot_order = {r: k for (r, _, k) in s2.pivots}

    # new cycle basis K' = K @ row_t_inv; summands read off the diagonal
    summands = []
    free_gradings = []
    torsion = []
    for row in range(presentation.n_rows):
        k = pivot_order.get(row)
        if k == 0:
            continue
        rep_coords = s2.row_t_inv.column(row)
        rep: Vector = {}
        for local, p in rep_coords.items():
            amb = ker_indices[local]
            shiftk = p.bit_length() - 1
            vec_iadd(rep, s1.col_t.column(amb), shiftk)
        g = presentation.row_gradings[row]
        if k is None:
            summands.append(Summand("free", g, 0, tuple(sorted(rep.items()))))
            free_gradings.append(g)
        else:
            summands.append(Summand("torsion", g, k, tuple(sorted(rep.items()))))
            torsion.append((g, k))

    module = GradedModule(free=tuple(free_gradings), torsion=tuple(torsion))
    pres = HomologyPresentation(
        differential=d,
        smith=s1,
        ker_indices=ker_indices,
        presentation=presentation,
        pres_smith=s2,
        summands=tuple(summands),
        module=module,
    )
    return module, pres


@dataclass(frozen=True)
class InducedMap:
    """Matrix of a chain map on homology, in the representative bases."""

    src: HomologyPresentation
    dst: HomologyPresentation
    shift: Grading
    matrix: tuple  # of ((dst_summand, src_summand), poly)

    def entry(self, dst_idx: int, src_idx: int) -> Poly:
        for (pair, p) in self.matrix:
            if pair == (dst_idx, src_idx):
                return p
        return 0

    def is_zero(self) -> bool:
        return not self.matrix


def induced_map(f: MonomialMatrix, src: HomologyPresentation,
                dst: HomologyPresentation, *, check: bool = True) -> InducedMap:
    """Map induced on homology by a chain map f."""
    if check:
        lhs = f.compose(src.differential)
        rhs = dst.differential.compose(f)
        if lhs.entries != rhs.entries:
            raise NotAChainMapError("f does not commute with the differentials")
    entries = []
    for s_idx, s in enumerate(src.summands):
        w = f.apply(s.rep_vector())
        coords = dst.class_coords(w)
        for d_idx, p in sorted(coords.items()):
            entries.append(((d_idx, s_idx), p))
    return InducedMap(src=src, dst=dst, shift=f.shift, matrix=tuple(entries))


def class_is_zero(pres: HomologyPresentation, z: Mapping[int, Poly]) -> bool:
    """True iff the cycle z is a boundary; exact membership in the Smith basis."""
    return pres.class_is_zero(z)


# ---------------------------------------------------------------------------
# independent plain-F2 route after truncating U-powers

def gf2_rank(rows: list[int]) -> int:
    """Rank over GF(2) of int-bitset rows."""
    rank = 0
    basis: list[int] = []
    for row in rows:
        for b in basis:
            row = min(row, row ^ b)
        if row:
            basis.append(row)
            basis.sort(reverse=True)
            rank += 1
    return rank


def gf2_in_span(rows: list[int], vec: int) -> bool:
    """Whether vec lies in the GF(2) row span of rows."""
    basis: list[int] = []
    for row in rows:
        for b in basis:
            row = min(row, row ^ b)
        if row:
            basis.append(row)
            basis.sort(reverse=True)
    for b in basis:
        vec = min(vec, vec ^ b)
    return vec == 0


def default_truncation(max_power: int, genus: int, n: int) -> int:
    """Default truncation bound for the plain-F2 fallback solver."""
    return 2 * (max_power + genus + abs(n) + 1)


def _expand(vec: Mapping[int, Poly], T: int) -> int:
    out = 0
    for i, p in vec.items():
        out |= (p & ((1 << T) - 1)) << (i * T)
    return out


def boundary_membership_f2(d: MonomialMatrix, z: Mapping[int, Poly], T: int) -> bool:
    """Boundary test for z in the quotient complex by U^T, over plain F2.

    Sound for true boundaries; a positive answer is only as good as the
    truncation, so callers recompute at 2T and compare.
    """
    rows = []
    for j in range(d.n_cols):
        col = d.column(j)
        if not col:
            continue
        min_p = min(p.bit_length() - 1 for p in col.values())
        for t in range(T - min_p):
            expanded = _expand(vec_scale(col, t), T)
            if expanded:
                rows.append(expanded)
    return gf2_in_span(rows, _expand(z, T))


def f2_homology_dimensions(d: MonomialMatrix, T: int) -> dict:
    """F2 dimension of homology per degree, for the quotient by U^T.

    Independent of the Smith route: plain rank computations on the
    degree-graded pieces of the truncated complex.
    """
    by_degree: dict = {}
    for i in range(d.n_rows):
        for t in range(T):
            by_degree.setdefault(d.row_gradings[i] - 2 * t, []).append((i, t))
    ranks: dict = {}
    dims: dict = {}
    for deg, basis in by_degree.items():
        target = by_degree.get(deg - 1, [])
        tpos = {bt: idx for idx, bt in enumerate(target)}
        rows = []
        for (i, t) in basis:
            row = 0
            for (r, c) in d.entries:
                if c != i:
                    continue
                tt = t + d.power(r, c)
                if tt < T and (r, tt) in tpos:
                    row |= 1 << tpos[(r, tt)]
            rows.append(row)
        ranks[deg] = gf2_rank(rows)
    for deg, basis in by_degree.items():
        dims[deg] = len(basis) - ranks.get(deg, 0) - ranks.get(deg + 1, 0)
    return dims
