"""Finite models of the full knot Floer complex.

A model is a finite list of generators carrying a Maslov grading M and an
Alexander grading A, a differential whose terms are single monomials U^a,
and an optional flip map.  The generator x sits at filtration (0, A(x)) and
U^a x at (-a, A(x) - a).  Differential terms must drop the Maslov grading
by one and may not raise either filtration coordinate.

The flip map is the chain homotopy equivalence exchanging the two
filtration directions; it is part of the input data because the underlying
equivalence is not determined by the rest of the model.  When it is absent
only "theorem mode" computations are available downstream.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace
from typing import Optional

from .f2u import MonomialMatrix, gf2_rank, homology

BUILTIN_NAMES = ("unknot", "rh_trefoil", "lh_trefoil", "figure_eight", "t25", "t34")

# error codes for the validator
PARSE = "parse"
D_SQUARED = "d_squared"
GRADING = "grading"
FILTRATION = "filtration"
FLIP = "flip"
SYMMETRY = "symmetry"


class ComplexError(ValueError):
    """Invalid knot complex data; ``code`` names the violated rule."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class MissingFlipError(ComplexError):
    """An operation needing the flip map was called on a flipless model."""

    def __init__(self, message: str = "model has no flip map; only theorem mode is available"):
        super().__init__(FLIP, message)


@dataclass(frozen=True)
class Generator:
    id: str
    maslov: int
    alexander: int


@dataclass(frozen=True)
class Term:
    """Coefficient U^upower on the arrow src -> dst."""

    src: str
    dst: str
    upower: int


@dataclass(frozen=True)
class KnotComplex:
    name: str
    generators: tuple
    differential: tuple
    flip: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(
            self, "differential",
            tuple(sorted(self.differential, key=lambda t: (t.src, t.dst, t.upower))))
        if self.flip is not None:
            object.__setattr__(
                self, "flip",
                tuple(sorted(self.flip, key=lambda t: (t.src, t.dst, t.upower))))

    def gen(self, gid: str) -> Generator:
        for g in self.generators:
            if g.id == gid:
                return g
        raise KeyError(gid)

    @property
    def ids(self) -> tuple:
        return tuple(g.id for g in self.generators)

    def maslov(self, gid: str) -> int:
        return self.gen(gid).maslov

    def alexander(self, gid: str) -> int:
        return self.gen(gid).alexander

    def has_flip(self) -> bool:
        return self.flip is not None

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "generators": [
                {"id": g.id, "maslov": g.maslov, "alexander": g.alexander}
                for g in self.generators
            ],
            "differential": [
                {"from": t.src, "to": t.dst, "upower": t.upower}
                for t in self.differential
            ],
        }
        if self.flip is not None:
            out["flip"] = [
                {"from": t.src, "to": t.dst, "upower": t.upower} for t in self.flip
            ]
        return out


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    name: str
    issues: tuple

    @property
    def ok(self) -> bool:
        return not self.issues

    def codes(self) -> tuple:
        return tuple(i.code for i in self.issues)


def _d_squared_terms(c: KnotComplex) -> dict:
    """Parity of two-step paths, keyed by (src, dst, total power)."""
    out: dict = {}
    by_src: dict = {}
    for t in c.differential:
        by_src.setdefault(t.src, []).append(t)
    for t1 in c.differential:
        for t2 in by_src.get(t1.dst, ()):
            key = (t1.src, t2.dst, t1.upower + t2.upower)
            out[key] = out.get(key, 0) ^ 1
    return {k: v for k, v in out.items() if v}


def _flip_as_map(c: KnotComplex) -> dict:
    """Flip as a dict (src, dst) -> set of powers with odd coefficient."""
    out: dict = {}
    for t in c.flip:
        key = (t.src, t.dst)
        out.setdefault(key, set())
        out[key] ^= {t.upower}
    return {k: v for k, v in out.items() if v}


def _compose_term_maps(first: dict, second: dict) -> dict:
    """Compose maps given as (src, dst) -> power-parity sets (second after first)."""
    out: dict = {}
    for (a, b), powers1 in first.items():
        for (b2, cdst), powers2 in second.items():
            if b2 != b:
                continue
            key = (a, cdst)
            acc = out.setdefault(key, set())
            for p1 in powers1:
                for p2 in powers2:
                    acc ^= {p1 + p2}
    return {k: v for k, v in out.items() if v}


def _diff_as_map(c: KnotComplex) -> dict:
    out: dict = {}
    for t in c.differential:
        key = (t.src, t.dst)
        out.setdefault(key, set())
        out[key] ^= {t.upower}
    return {k: v for k, v in out.items() if v}


def validate(c: KnotComplex) -> ValidationReport:
    """Check every model invariant; the report lists each violation."""
    issues = []
    seen = set()
    for g in c.generators:
        if g.id in seen:
            issues.append(ValidationIssue(PARSE, f"duplicate generator id {g.id!r}"))
        seen.add(g.id)

    for t in c.differential:
        if t.src not in seen or t.dst not in seen:
            issues.append(ValidationIssue(PARSE, f"unknown generator in term {t}"))
            continue
        if t.upower < 0:
            issues.append(ValidationIssue(
                FILTRATION, f"negative U-power on {t.src}->{t.dst}"))
        if c.maslov(t.dst) - 2 * t.upower != c.maslov(t.src) - 1:
            issues.append(ValidationIssue(
                GRADING,
                f"term {t.src}->{t.dst} U^{t.upower} is not Maslov degree -1"))
        if c.alexander(t.dst) - t.upower > c.alexander(t.src):
            issues.append(ValidationIssue(
                FILTRATION,
                f"term {t.src}->{t.dst} U^{t.upower} raises the Alexander filtration"))

    if not any(i.code == PARSE for i in issues):
        bad = _d_squared_terms(c)
        for (a, b, p) in sorted(bad):
            issues.append(ValidationIssue(
                D_SQUARED, f"d^2 has U^{p} term from {a} to {b}"))

        # graded Euler characteristic symmetry (M, A) <-> (M - 2A, -A)
        pairs = sorted((g.maslov, g.alexander) for g in c.generators)
        mirrored = sorted((g.maslov - 2 * g.alexander, -g.alexander)
                          for g in c.generators)
        if pairs != mirrored:
            issues.append(ValidationIssue(
                SYMMETRY, "generator (M, A) multiset is not symmetric"))

    if c.flip is not None and not any(i.code == PARSE for i in issues):
        issues.extend(_validate_flip(c))
    return ValidationReport(name=c.name, issues=tuple(issues))


def _validate_flip(c: KnotComplex) -> list:
    issues = []
    ids = set(c.ids)
    for t in c.flip:
        if t.src not in ids or t.dst not in ids:
            issues.append(ValidationIssue(FLIP, f"unknown generator in flip term {t}"))
            return issues
        if c.maslov(t.dst) - 2 * t.upower != c.maslov(t.src):
            issues.append(ValidationIssue(
                FLIP, f"flip term {t.src}->{t.dst} U^{t.upower} is not Maslov preserving"))
        lower = max(-c.alexander(t.src), c.alexander(t.dst))
        if t.upower < lower:
            issues.append(ValidationIssue(
                FLIP,
                f"flip term {t.src}->{t.dst} U^{t.upower} does not carry (i,j) to (j,i)"))
    if issues:
        return issues

    dmap = _diff_as_map(c)
    fmap = _flip_as_map(c)
    if _compose_term_maps(dmap, fmap) != _compose_term_maps(fmap, dmap):
        issues.append(ValidationIssue(FLIP, "flip is not a chain map"))
        return issues

    # isomorphism on total homology: over the Laurent ring every homogeneous
    # monomial is a unit, so the 0/1 occupancy pattern is faithful and the
    # flip cone is acyclic iff its pattern matrix has half rank
    n = len(c.generators)
    pos = {g.id: i for i, g in enumerate(c.generators)}
    rows = [0] * (2 * n)
    for (a, b) in dmap:
        if len(dmap[(a, b)]) % 2:
            rows[pos[b]] |= 1 << pos[a]
            rows[n + pos[b]] |= 1 << (n + pos[a])
    for (a, b) in fmap:
        if len(fmap[(a, b)]) % 2:
            rows[n + pos[b]] |= 1 << pos[a]
    if gf2_rank(rows) != n:
        issues.append(ValidationIssue(FLIP, "flip is not invertible on total homology"))
        return issues

    # the restriction from {j <= 0} to {i <= 0} must be an equivalence:
    # its cone over F2[U] has to be acyclic
    cone = _restricted_flip_cone(c)
    module, _ = homology(cone)
    if not module.is_zero():
        issues.append(ValidationIssue(
            FLIP, "restricted flip cone from {j<=0} to {i<=0} is not acyclic"))
    return issues


def _restricted_flip_cone(c: KnotComplex) -> MonomialMatrix:
    """Cone of the flip restricted to a map {j <= 0} -> {i <= 0}, over F2[U]."""
    n = len(c.generators)
    pos = {g.id: i for i, g in enumerate(c.generators)}
    # source basis U^{A(x)} x, target basis x; cone = source[1] + target
    labels = tuple(("s", g.id) for g in c.generators) + tuple(("t", g.id) for g in c.generators)
    gradings = tuple(g.maslov - 2 * g.alexander + 1 for g in c.generators) + \
        tuple(g.maslov for g in c.generators)
    entries = set()
    for t in c.differential:
        # source block: power A(src) + upower - A(dst) >= 0 by the j-filtration
        entries ^= {(pos[t.dst], pos[t.src])}
        entries ^= {(n + pos[t.dst], n + pos[t.src])}
    for t in c.flip:
        # flip block: power A(src) + upower >= 0 by the flip filtration rule
        entries ^= {(n + pos[t.dst], pos[t.src])}
    return MonomialMatrix(
        row_labels=labels, col_labels=labels,
        row_gradings=gradings, col_gradings=gradings,
        shift=-1, entries=frozenset(entries),
    )


def check(c: KnotComplex) -> KnotComplex:
    """Validate and return the complex, raising on the first violation."""
    report = validate(c)
    if not report.ok:
        first = report.issues[0]
        raise ComplexError(first.code, f"{c.name}: {first.message}")
    return c


# ---------------------------------------------------------------------------
# file format

def parse(text: str) -> KnotComplex:
    """Parse and validate the JSON model format."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ComplexError(PARSE, f"invalid JSON: {e}") from e
    return from_json(data)


def from_json(data: dict) -> KnotComplex:
    try:
        gens = tuple(
            Generator(id=str(g["id"]), maslov=int(g["maslov"]),
                      alexander=int(g["alexander"]))
            for g in data["generators"]
        )
        diff = tuple(
            Term(src=str(t["from"]), dst=str(t["to"]), upower=int(t["upower"]))
            for t in data.get("differential", ())
        )
        flip = None
        if "flip" in data and data["flip"] is not None:
            flip = tuple(
                Term(src=str(t["from"]), dst=str(t["to"]), upower=int(t["upower"]))
                for t in data["flip"]
            )
        c = KnotComplex(name=str(data.get("name", "unnamed")),
                        generators=gens, differential=diff, flip=flip)
    except (KeyError, TypeError, ValueError) as e:
        raise ComplexError(PARSE, f"malformed complex data: {e}") from e
    return check(c)


def parse_file(path: str) -> KnotComplex:
    with open(path) as fh:
        return parse(fh.read())


# ---------------------------------------------------------------------------
# basic constructions

def genus(c: KnotComplex) -> int:
    """Width of the model: max |A| over generators, the truncation half-width."""
    return max((abs(g.alexander) for g in c.generators), default=0)


def mirror(c: KnotComplex, name: Optional[str] = None) -> KnotComplex:
    """Dual model: arrows reversed, gradings negated, U-powers kept."""
    gens = tuple(Generator(g.id, -g.maslov, -g.alexander) for g in c.generators)
    diff = tuple(Term(t.dst, t.src, t.upower) for t in c.differential)
    flip = None
    if c.flip is not None:
        flip = tuple(Term(t.dst, t.src, t.upower) for t in c.flip)
    return check(KnotComplex(
        name=name if name is not None else f"mirror({c.name})",
        generators=gens, differential=diff, flip=flip))


def default_flip(c: KnotComplex) -> tuple:
    """Canonical monomial flip U^{-A(x)} sigma(x) from a symmetry matching.

    sigma must pair x with a generator at (M(x) - 2A(x), -A(x)); all such
    matchings are searched and the first one passing the chain-map test is
    returned (in generator order, so the result is deterministic).
    """
    by_bigr: dict = {}
    for g in c.generators:
        by_bigr.setdefault((g.maslov, g.alexander), []).append(g.id)

    classes = sorted(by_bigr)
    targets = {}
    for key in classes:
        m, a = key
        dual = (m - 2 * a, -a)
        if dual not in by_bigr or len(by_bigr[dual]) != len(by_bigr[key]):
            raise ComplexError(FLIP, f"no symmetry partner class for (M,A)={key}")
        targets[key] = by_bigr[dual]

    def candidates():
        perm_lists = []
        for key in classes:
            srcs = by_bigr[key]
            perm_lists.append([list(zip(srcs, p))
                               for p in itertools.permutations(targets[key])])
        for combo in itertools.product(*perm_lists):
            sigma = {}
            for pairs in combo:
                for s, t in pairs:
                    sigma[s] = t
            yield sigma

    for sigma in candidates():
        flip = tuple(Term(gid, sigma[gid], -c.alexander(gid)) for gid in c.ids)
        trial = replace(c, flip=flip)
        if not _validate_flip(trial):
            return trial.flip
    raise ComplexError(FLIP, f"{c.name}: no monomial flip matching is a chain map")


def all_default_flips(c: KnotComplex) -> list:
    """Every valid monomial flip matching (used to cross-check flip independence)."""
    out = []
    by_bigr: dict = {}
    for g in c.generators:
        by_bigr.setdefault((g.maslov, g.alexander), []).append(g.id)
    classes = sorted(by_bigr)
    perm_lists = []
    for key in classes:
        m, a = key
        dual = (m - 2 * a, -a)
        srcs = by_bigr[key]
        perm_lists.append([list(zip(srcs, p))
                           for p in itertools.permutations(by_bigr[dual])])
    for combo in itertools.product(*perm_lists):
        sigma = {}
        for pairs in combo:
            for s, t in pairs:
                sigma[s] = t
        flip = tuple(Term(gid, sigma[gid], -c.alexander(gid)) for gid in c.ids)
        if not _validate_flip(replace(c, flip=flip)):
            out.append(flip)
    return out


# ---------------------------------------------------------------------------
# staircase models for L-space knots

def staircase_from_alexander(coeffs, name: str = "staircase",
                             ids: Optional[list] = None) -> KnotComplex:
    """Staircase model from a symmetrized Alexander polynomial.

    ``coeffs`` lists the coefficients from the top exponent g down to -g.
    They must be palindromic, the nonzero ones must alternate in sign
    starting with +1, and they must sum to 1.
    """
    coeffs = list(coeffs)
    if not coeffs or len(coeffs) % 2 == 0:
        raise ComplexError(PARSE, "coefficient list must have odd length")
    if coeffs != coeffs[::-1]:
        raise ComplexError(PARSE, "coefficients are not symmetric")
    if sum(coeffs) != 1:
        raise ComplexError(PARSE, "coefficients do not evaluate to 1 at t=1")
    g = (len(coeffs) - 1) // 2
    exps = []
    signs = []
    for k, coef in enumerate(coeffs):
        if coef == 0:
            continue
        if coef not in (1, -1):
            raise ComplexError(PARSE, f"coefficient {coef} is not in {{0, 1, -1}}")
        exps.append(g - k)
        signs.append(coef)
    expected = [1 if i % 2 == 0 else -1 for i in range(len(signs))]
    if signs != expected or len(signs) % 2 == 0:
        raise ComplexError(PARSE, "nonzero coefficients do not alternate +1, -1, ..., +1")

    m = len(exps)
    if ids is None:
        ids = [f"x{i}" for i in range(m)]
    if len(ids) != m:
        raise ComplexError(PARSE, "wrong number of generator ids")

    maslov = [0] * m
    for i in range(1, m):
        if i % 2 == 1:
            maslov[i] = maslov[i - 1] - 2 * (exps[i - 1] - exps[i]) + 1
        else:
            maslov[i] = maslov[i - 1] - 1
    gens = tuple(Generator(ids[i], maslov[i], exps[i]) for i in range(m))
    diff = []
    for i in range(1, m, 2):
        diff.append(Term(ids[i], ids[i - 1], exps[i - 1] - exps[i]))
        diff.append(Term(ids[i], ids[i + 1], 0))
    flip = tuple(Term(ids[i], ids[m - 1 - i], -exps[i]) for i in range(m))
    return check(KnotComplex(name=name, generators=gens,
                             differential=tuple(diff), flip=flip))


# ---------------------------------------------------------------------------
# built-in library

def builtin(name: str) -> KnotComplex:
    """Validated model with flip for one of the library knots."""
    if name == "unknot":
        return staircase_from_alexander([1], name="unknot", ids=["a"])
    if name == "rh_trefoil":
        return staircase_from_alexander([1, -1, 1], name="rh_trefoil",
                                        ids=["a", "b", "c"])
    if name == "lh_trefoil":
        return mirror(builtin("rh_trefoil"), name="lh_trefoil")
    if name == "t25":
        return staircase_from_alexander([1, -1, 1, -1, 1], name="t25")
    if name == "t34":
        return staircase_from_alexander([1, -1, 0, 1, 0, -1, 1], name="t34")
    if name == "figure_eight":
        gens = (
            Generator("a", 1, 1),
            Generator("b", 0, 0),
            Generator("c", 0, 0),
            Generator("d", -1, -1),
            Generator("e", 0, 0),
        )
        diff = (
            Term("a", "b", 0),
            Term("c", "d", 0),
            Term("c", "a", 1),
            Term("d", "b", 1),
        )
        flip = (
            Term("a", "d", -1),
            Term("b", "b", 0),
            Term("c", "c", 0),
            Term("d", "a", 1),
            Term("e", "e", 0),
        )
        return check(KnotComplex(name="figure_eight", generators=gens,
                                 differential=diff, flip=flip))
    raise ComplexError(PARSE, f"unknown builtin {name!r}; choose from {BUILTIN_NAMES}")
