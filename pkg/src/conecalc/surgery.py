"""Surgery formula machinery: level subcomplexes, V/H invariants, cones.

For a model C and an integer level s, the quadrant complex is the
subcomplex spanned by elements with filtration i <= 0 and j <= s; it is
freely generated over F2[U] by U^{max(0, A(x)-s)} x.  The halfplane
complex (i <= 0 only) computes the Floer homology of the three-sphere and
is the common target of the two structure maps: the inclusion, and the
inclusion followed by the U^s identification and the flip.

The n-surgery cone is assembled per Spin^c class from finitely many
quadrant columns and halfplane rows; the truncation windows are chosen so
that dropping the two tails (where the structure maps are equivalences)
is a quasi-isomorphism, with the two edge maps of each class set to zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from . import cfk
from .cfk import KnotComplex, MissingFlipError
from .f2u import (
    GradedModule,
    HomologyPresentation,
    MalformedComplexError,
    MonomialMatrix,
    Vector,
    homology,
    induced_map,
)


@dataclass(frozen=True)
class FilteredPiece:
    """A quadrant or halfplane subcomplex with parent bookkeeping."""

    knot: str
    level: Optional[int]          # None for the halfplane complex
    gen_ids: tuple
    parent_powers: tuple          # U-power on each generator inside the parent
    gradings: tuple
    differential: MonomialMatrix

    @property
    def size(self) -> int:
        return len(self.gen_ids)


def quadrant_complex(c: KnotComplex, s: int) -> FilteredPiece:
    """Subcomplex at filtration {i <= 0 and j <= s}."""
    alphas = tuple(max(0, g.alexander - s) for g in c.generators)
    return _piece(c, s, alphas)


def halfplane_complex(c: KnotComplex) -> FilteredPiece:
    """Subcomplex at filtration {i <= 0}; the three-sphere model."""
    return _piece(c, None, tuple(0 for _ in c.generators))


def _piece(c: KnotComplex, level, alphas) -> FilteredPiece:
    ids = c.ids
    pos = {gid: i for i, gid in enumerate(ids)}
    gradings = tuple(c.maslov(gid) - 2 * a for gid, a in zip(ids, alphas))
    entries = set()
    for t in c.differential:
        entries ^= {(pos[t.dst], pos[t.src])}
    d = MonomialMatrix(
        row_labels=ids, col_labels=ids,
        row_gradings=gradings, col_gradings=gradings,
        shift=-1, entries=frozenset(entries),
    )
    return FilteredPiece(knot=c.name, level=level, gen_ids=ids,
                         parent_powers=alphas, gradings=gradings, differential=d)


def inclusion_map(c: KnotComplex, s: int) -> MonomialMatrix:
    """Chain map from the level-s quadrant into the halfplane complex."""
    src = quadrant_complex(c, s)
    dst = halfplane_complex(c)
    entries = frozenset((i, i) for i in range(len(c.generators)))
    return MonomialMatrix(
        row_labels=dst.gen_ids, col_labels=src.gen_ids,
        row_gradings=dst.gradings, col_gradings=src.gradings,
        shift=0, entries=entries,
    )


def flip_inclusion_map(c: KnotComplex, s: int) -> MonomialMatrix:
    """Inclusion into {j <= s}, the U^s identification, then the flip.

    Drops the Maslov grading by 2s; the target is the halfplane complex
    (labelled s+n in the cone).
    """
    if not c.has_flip():
        raise MissingFlipError()
    src = quadrant_complex(c, s)
    dst = halfplane_complex(c)
    pos = {gid: i for i, gid in enumerate(c.ids)}
    entries = set()
    for t in c.flip:
        entries ^= {(pos[t.dst], pos[t.src])}
    return MonomialMatrix(
        row_labels=dst.gen_ids, col_labels=src.gen_ids,
        row_gradings=dst.gradings, col_gradings=src.gradings,
        shift=-2 * s, entries=frozenset(entries),
    )


# ---------------------------------------------------------------------------
# V and H invariants

def _presentation(piece: FilteredPiece) -> tuple[GradedModule, HomologyPresentation]:
    return homology(piece.differential)


@lru_cache(maxsize=None)
def _halfplane_data(c: KnotComplex):
    module, pres = _presentation(halfplane_complex(c))
    if module.free != (0,) or module.torsion:
        raise MalformedComplexError(
            f"{c.name}: halfplane homology is {module}, expected one free summand at 0")
    return module, pres


def _free_image_power(f: MonomialMatrix, src_pres: HomologyPresentation,
                      dst_pres: HomologyPresentation) -> int:
    """Exponent k with image(free generator) = U^k (free generator)."""
    src_free = src_pres.free_summand_indices()
    dst_free = dst_pres.free_summand_indices()
    if len(src_free) != 1 or len(dst_free) != 1:
        raise MalformedComplexError("free rank is not one on both sides")
    im = induced_map(f, src_pres, dst_pres)
    p = im.entry(dst_free[0], src_free[0])
    if p == 0:
        raise MalformedComplexError("structure map vanishes on the free part")
    assert p & (p - 1) == 0, "non-monomial induced entry"
    return p.bit_length() - 1


def quadrant_presentation(c: KnotComplex, s: int):
    module, pres = _presentation(quadrant_complex(c, s))
    if len(module.free) != 1:
        raise MalformedComplexError(
            f"{c.name}: quadrant homology at level {s} has free rank {len(module.free)}")
    return module, pres


def v_invariant(c: KnotComplex, s: int) -> int:
    """Cokernel size of the inclusion on homology free parts.

    Equals the least k with U^k (free generator) in the image.
    """
    _, src = quadrant_presentation(c, s)
    _, dst = _halfplane_data(c)
    return _free_image_power(inclusion_map(c, s), src, dst)


def h_invariant(c: KnotComplex, s: int) -> tuple[int, str]:
    """H invariant and its provenance: "direct" via the flip, else "theorem".

    Without a flip the symmetry H_s = V_{-s} is used instead.
    """
    if c.has_flip():
        _, src = quadrant_presentation(c, s)
        _, dst = _halfplane_data(c)
        return _free_image_power(flip_inclusion_map(c, s), src, dst), "direct"
    return v_invariant(c, -s), "theorem"


def d_invariant_one_surgery(c: KnotComplex) -> int:
    """Correction term of +1 surgery: -2 V_0."""
    return -2 * v_invariant(c, 0)


@dataclass(frozen=True)
class VHTable:
    """V_s and H_s over a window of levels, plus the +1-surgery d-invariant."""

    name: str
    genus: int
    s_values: tuple
    v: tuple
    h: tuple
    h_mode: str
    d1: int

    def rows(self):
        return list(zip(self.s_values, self.v, self.h))

    def v_at(self, s: int) -> int:
        return self.v[self.s_values.index(s)]

    def h_at(self, s: int) -> int:
        return self.h[self.s_values.index(s)]

    def to_json(self) -> dict:
        return {
            "knot": self.name,
            "genus": self.genus,
            "d1": self.d1,
            "h_mode": self.h_mode,
            "rows": [{"s": s, "V": v, "H": h} for (s, v, h) in self.rows()],
        }


def vh_table(c: KnotComplex, s_min: Optional[int] = None,
             s_max: Optional[int] = None) -> VHTable:
    g = cfk.genus(c)
    b = max(g, 1)
    lo = -b if s_min is None else s_min
    hi = b if s_max is None else s_max
    if lo > hi:
        raise ValueError("empty level window")
    s_values = tuple(range(lo, hi + 1))
    v = tuple(v_invariant(c, s) for s in s_values)
    hs = []
    mode = "direct" if c.has_flip() else "theorem"
    for s in s_values:
        val, _ = h_invariant(c, s)
        hs.append(val)
    return VHTable(name=c.name, genus=g, s_values=s_values, v=v,
                   h=tuple(hs), h_mode=mode, d1=-2 * v_invariant(c, 0))


# ---------------------------------------------------------------------------
# cone gradings

def grading_shift(n: int, s: int) -> Fraction:
    """Degree of the trace cobordism map for the level-s structure.

    ((2s+n)^2/n - 2*chi - 3*sigma)/4 with chi = sigma = 1 for n > 0.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    return (Fraction((2 * s + n) ** 2, n) - 5) / 4


def _anchor_level(n: int, label: int) -> int:
    """Class representative minimizing |2s + n| (ties to the smaller s)."""
    best = None
    base = label % n
    k0 = (-n - 2 * base) // (2 * n)
    for k in (k0 - 1, k0, k0 + 1, k0 + 2):
        s = base + k * n
        key = (abs(2 * s + n), s)
        if best is None or key < best[0]:
            best = (key, s)
    return best[1]


@lru_cache(maxsize=None)
def sigma_row(n: int, s: int) -> Fraction:
    """Grading offset of the level-s halfplane row inside the cone.

    Anchored so that at the anchor level of each class the row inclusion
    has exactly the trace cobordism degree; consecutive rows of one class
    are then forced by homogeneity (they agree with the formula mod 2).
    """
    anchor = _anchor_level(n, s % n)
    sigma = grading_shift(n, anchor)
    t = anchor
    while t < s:
        sigma += 2 * t
        t += n
    while t > s:
        t -= n
        sigma -= 2 * t
    return sigma


def sigma_col(n: int, s: int) -> Fraction:
    """Grading offset of the level-s quadrant column inside the cone."""
    return sigma_row(n, s) + 1


# ---------------------------------------------------------------------------
# the truncated cone

def class_window(n: int, label: int, b: int) -> tuple:
    """Kept column and row levels for one Spin^c class at half-width b.

    Columns live strictly between the largest class level <= -b and the
    smallest class level >= b (pushed up so at least one column survives);
    rows additionally lose the bottom column's partner.
    """
    label = label % n
    low = label + n * ((-b - label) // n)          # largest <= -b in class
    high0 = label - n * ((label - b) // n)          # smallest >= b in class
    high = max(high0, low + 2 * n)
    cols = tuple(range(low + n, high, n))
    rows = tuple(range(low + 2 * n, high, n))
    return low, high, cols, rows


@dataclass(frozen=True)
class ConeClass:
    """Truncated cone summand for a single Spin^c class."""

    knot: str
    n: int
    label: int
    col_levels: tuple
    row_levels: tuple
    basis: tuple                   # (kind, level, gen id) per index
    differential: MonomialMatrix
    spans: tuple                   # ((kind, level), start, stop)

    def span(self, kind: str, level: int) -> tuple:
        for (key, start, stop) in self.spans:
            if key == (kind, level):
                return start, stop
        raise KeyError((kind, level))

    def embed_row_vector(self, level: int, vec: Vector) -> Vector:
        """Lift a halfplane-complex vector into the cone at a kept row."""
        start, _ = self.span("row", level)
        return {start + i: p for i, p in vec.items()}


@dataclass(frozen=True)
class SurgeryCone:
    knot: str
    n: int
    classes: tuple

    def cls(self, label: int) -> ConeClass:
        return self.classes[label % self.n]


def build_surgery_cone(c: KnotComplex, n: int, extra: int = 0,
                       include_level: Optional[int] = None) -> SurgeryCone:
    """Assemble the truncated cone of the surgery differential.

    ``extra`` widens every window; ``include_level`` forces the window of
    its class to keep that halfplane row (used for cobordism map classes).
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    if not c.has_flip():
        raise MissingFlipError()
    if extra < 0:
        raise ValueError("extra must be nonnegative")
    b = max(cfk.genus(c), 1) + extra
    if include_level is not None:
        b = max(b, abs(include_level) + 2 * n)
    classes = tuple(_build_class(c, n, label, b) for label in range(n))
    return SurgeryCone(knot=c.name, n=n, classes=classes)


def _build_class(c: KnotComplex, n: int, label: int, b: int) -> ConeClass:
    _, _, cols, rows = class_window(n, label, b)
    ids = c.ids
    pos = {gid: i for i, gid in enumerate(ids)}
    m = len(ids)

    basis = []
    gradings = []
    spans = []
    pieces = {}
    for s in cols:
        piece = quadrant_complex(c, s)
        pieces[("col", s)] = piece
        start = len(basis)
        sig = sigma_col(n, s)
        for i, gid in enumerate(ids):
            basis.append(("col", s, gid))
            gradings.append(piece.gradings[i] + sig)
        spans.append((("col", s), start, len(basis)))
    half = halfplane_complex(c)
    for s in rows:
        start = len(basis)
        sig = sigma_row(n, s)
        for i, gid in enumerate(ids):
            basis.append(("row", s, gid))
            gradings.append(half.gradings[i] + sig)
        spans.append((("row", s), start, len(basis)))

    offset = {key: start for (key, start, _) in spans}
    entries = set()
    row_set = set(rows)
    for s in cols:
        o = offset[("col", s)]
        for t in c.differential:
            entries ^= {(o + pos[t.dst], o + pos[t.src])}
        if s in row_set:
            ob = offset[("row", s)]
            for i in range(m):
                entries ^= {(ob + i, o + i)}
        if s + n in row_set:
            ob = offset[("row", s + n)]
            for t in c.flip:
                entries ^= {(ob + pos[t.dst], o + pos[t.src])}
    for s in rows:
        o = offset[("row", s)]
        for t in c.differential:
            entries ^= {(o + pos[t.dst], o + pos[t.src])}

    d = MonomialMatrix(
        row_labels=tuple(basis), col_labels=tuple(basis),
        row_gradings=tuple(gradings), col_gradings=tuple(gradings),
        shift=-1, entries=frozenset(entries),
    )
    if not d.compose(d).is_zero():
        raise MalformedComplexError(f"{c.name}: cone differential does not square to zero")
    return ConeClass(knot=c.name, n=n, label=label, col_levels=cols,
                     row_levels=rows, basis=tuple(basis), differential=d,
                     spans=tuple(spans))


@dataclass(frozen=True)
class SurgeryHomology:
    """Homology of n-surgery, one graded module per Spin^c class."""

    knot: str
    n: int
    modules: tuple        # (label, GradedModule) sorted by label

    def module(self, label: int) -> GradedModule:
        for (lab, mod) in self.modules:
            if lab == label % self.n:
                return mod
        raise KeyError(label)

    @property
    def total_free_rank(self) -> int:
        return sum(m.free_rank for (_, m) in self.modules)

    def canonical(self) -> tuple:
        return tuple((lab, m.free, m.torsion) for (lab, m) in self.modules)

    def to_json(self) -> dict:
        return {
            "knot": self.knot,
            "n": self.n,
            "classes": [
                {
                    "label": lab,
                    "free": [str(g) for g in m.free],
                    "torsion": [{"grading": str(g), "order": k} for (g, k) in m.torsion],
                }
                for (lab, m) in self.modules
            ],
        }


def surgery_homology(c: KnotComplex, n: int, extra: int = 0) -> SurgeryHomology:
    """Graded homology of n-surgery from the truncated cone."""
    cone = build_surgery_cone(c, n, extra=extra)
    modules = []
    for klass in cone.classes:
        module, _ = homology(klass.differential)
        modules.append((klass.label, module))
    result = SurgeryHomology(knot=c.name, n=n, modules=tuple(modules))
    if result.total_free_rank != n:
        raise MalformedComplexError(
            f"{c.name}: total free rank {result.total_free_rank} != n = {n}")
    return result


def truncation_stability(c: KnotComplex, n: int, extra: int) -> bool:
    """Whether widening the truncation window leaves the homology unchanged."""
    if extra < 1:
        raise ValueError("extra must be >= 1")
    base = surgery_homology(c, n)
    grown = surgery_homology(c, n, extra=extra)
    return base.canonical() == grown.canonical()
