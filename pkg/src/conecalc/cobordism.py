"""Two-handle cobordism map classes through the surgery cone.

Attaching an n-framed 2-handle to the four-ball along a knot K produces
the trace of n-surgery.  For each Spin^c structure, labelled by an integer
s via <c_1, capped Seifert surface> = 2s + n, the induced map on the minus
Floer homology of the boundary is computed by pushing the generator of the
level-s halfplane row through the truncated cone: the map vanishes exactly
when that class is a boundary.  Rows outside every truncation window map
in by zero at the chain level, so those structures vanish automatically.

When the correction term of +1 surgery is zero the vanishing holds for
every Spin^c structure; this module verifies that statement directly and
turns it into a symplectic-filling obstruction for the trace.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import cfk, surgery
from .cfk import KnotComplex
from .f2u import Vector, homology
from .surgery import grading_shift  # re-exported surface for the grading formula

__all__ = [
    "SpincLabel", "TraceMapClass", "VanishingReport", "FillingVerdict",
    "grading_shift", "trace_map_class", "vanishing_report", "obstruct_filling",
    "report_to_json", "report_from_json", "verdict_to_json", "verdict_from_json",
]

OBSTRUCTED = "OBSTRUCTED"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class SpincLabel:
    """Integer label of a Spin^c structure on the n-trace."""

    n: int
    s: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be a positive integer")

    @property
    def evaluation(self) -> int:
        """Pairing of c_1 with the capped Seifert surface class."""
        return 2 * self.s + self.n

    @property
    def c1_squared(self) -> Fraction:
        return Fraction(self.evaluation ** 2, self.n)

    @property
    def boundary_class(self) -> int:
        return self.s % self.n


@dataclass(frozen=True)
class TraceMapClass:
    """Image of the three-sphere tower generator in the cone homology."""

    knot: str
    spinc: SpincLabel
    cycle: tuple            # (cone index, poly) pairs; empty when chain-level zero
    is_zero: bool
    in_window: bool         # whether the row survives in the computed cone

    def cycle_vector(self) -> Vector:
        return dict(self.cycle)


def trace_map_class(c: KnotComplex, n: int, s: int) -> TraceMapClass:
    """Class of the level-s two-handle map in the cone homology.

    ``is_zero`` is exact: true iff the pushed-in generator is a boundary,
    in which case the whole F2[U]-module map vanishes.
    """
    cone = surgery.build_surgery_cone(c, n, include_level=s)
    klass = cone.cls(s)
    if s not in klass.row_levels:
        # the row was truncated away, so the chain-level map is zero
        return TraceMapClass(knot=c.name, spinc=SpincLabel(n, s), cycle=(),
                             is_zero=True, in_window=False)
    _, half_pres = surgery._halfplane_data(c)
    free_idx = half_pres.free_summand_indices()[0]
    rep = half_pres.summands[free_idx].rep_vector()
    z = klass.embed_row_vector(s, rep)
    _, cone_pres = homology(klass.differential)
    zero = cone_pres.class_is_zero(z)
    return TraceMapClass(knot=c.name, spinc=SpincLabel(n, s),
                         cycle=tuple(sorted(z.items())), is_zero=zero,
                         in_window=True)


@dataclass(frozen=True)
class VanishingReport:
    """Per-structure verdicts for the n-trace two-handle maps."""

    knot: str
    n: int
    d1: int
    verdicts: tuple          # (s, verdict, mode); verdict in {zero, nonzero, undetermined}
    theorem_mode: bool       # True when no flip was available
    conclusion: str

    def all_zero(self) -> bool:
        return all(v == "zero" for (_, v, _) in self.verdicts)

    def verdict_at(self, s: int) -> str:
        for (t, v, _) in self.verdicts:
            if t == s:
                return v
        raise KeyError(s)


def _direct_window(c: KnotComplex, n: int) -> list:
    """Representative levels whose rows survive a comfortably wide cone."""
    cone = surgery.build_surgery_cone(c, n, extra=2 * n + 1)
    levels = sorted({s for klass in cone.classes for s in klass.row_levels})
    return levels


def vanishing_report(c: KnotComplex, n: int) -> VanishingReport:
    """Verdicts for every structure in a wide window, plus the d-invariant test.

    With a flip the verdicts come from direct cone computations (all other
    structures vanish at the chain level); without one, the verdicts are
    what the correction term dictates, marked as theorem mode.
    """
    d1 = surgery.d_invariant_one_surgery(c)
    if c.has_flip():
        verdicts = []
        for s in _direct_window(c, n):
            tm = trace_map_class(c, n, s)
            verdicts.append((s, "zero" if tm.is_zero else "nonzero", "direct"))
        report = VanishingReport(
            knot=c.name, n=n, d1=d1, verdicts=tuple(verdicts),
            theorem_mode=False,
            conclusion=_conclusion_text(c.name, n, d1, verdicts),
        )
        if d1 == 0 and not report.all_zero():
            raise AssertionError(
                f"{c.name}: d1 = 0 but a direct verdict is nonzero; "
                "this contradicts the vanishing theorem")
        return report
    g = cfk.genus(c)
    levels = range(-(g + n), g + n + 1)
    verdict = "zero" if d1 == 0 else "undetermined"
    verdicts = tuple((s, verdict, "theorem") for s in levels)
    return VanishingReport(
        knot=c.name, n=n, d1=d1, verdicts=verdicts, theorem_mode=True,
        conclusion=_conclusion_text(c.name, n, d1, verdicts),
    )


def _conclusion_text(name: str, n: int, d1: int, verdicts) -> str:
    if d1 == 0:
        return (f"every two-handle map HF^-(S^3) -> HF^-(S^3_{n}({name})) vanishes: "
                f"d(S^3_1) = 0 forces surjectivity of the structure maps column "
                f"by column, so each tower generator is a boundary in the cone")
    if all(v == "zero" for (_, v, _) in verdicts):
        return (f"all tested two-handle maps vanish for n = {n}, although "
                f"d(S^3_1({name})) = {d1} != 0 gives no a priori vanishing")
    return (f"d(S^3_1({name})) = {d1} != 0; some two-handle map class is "
            f"nonzero in the cone")


@dataclass(frozen=True)
class FillingVerdict:
    """Symplectic-filling obstruction for the n-trace."""

    knot: str
    n: int
    d1: int
    verdict: str             # OBSTRUCTED or INCONCLUSIVE
    report: Optional[VanishingReport]
    conclusion: str


def obstruct_filling(c: KnotComplex, n: int) -> FillingVerdict:
    """Decide whether the n-trace is obstructed from filling its boundary.

    When d(S^3_1) = 0 the trace cannot be a symplectic filling of its
    boundary for any contact structure: a filling would embed in a closed
    symplectic four-manifold with b_2^+ >= 2, whose invariant both must be
    nonzero (symplectic non-vanishing) and factors through the vanishing
    two-handle map, a contradiction.
    """
    d1 = surgery.d_invariant_one_surgery(c)
    report = vanishing_report(c, n)
    if d1 == 0:
        text = (
            f"OBSTRUCTED: the {n}-trace of {c.name} is not a symplectic filling of "
            f"its boundary for any contact structure.  d(S^3_1) = 0, so every "
            f"two-handle map on HF^- vanishes; a filling would embed in a closed "
            f"symplectic manifold with b_2^+ >= 2 whose mixed invariant is nonzero "
            f"yet factors through the vanishing map.  Note the boundary itself may "
            f"still bound other symplectic fillings; only the trace is obstructed."
        )
        return FillingVerdict(knot=c.name, n=n, d1=d1, verdict=OBSTRUCTED,
                              report=report, conclusion=text)
    text = (
        f"INCONCLUSIVE: d(S^3_1({c.name})) = {d1} != 0, so the criterion "
        f"does not apply to the {n}-trace."
    )
    return FillingVerdict(knot=c.name, n=n, d1=d1, verdict=INCONCLUSIVE,
                          report=report, conclusion=text)


# ---------------------------------------------------------------------------
# report serialization

def report_to_json(r: VanishingReport) -> dict:
    return {
        "knot": r.knot,
        "n": r.n,
        "d1": r.d1,
        "per_s": [{"s": s, "verdict": v, "mode": m} for (s, v, m) in r.verdicts],
        "conclusion": r.conclusion,
    }


def report_from_json(data: dict) -> VanishingReport:
    verdicts = tuple((row["s"], row["verdict"], row["mode"]) for row in data["per_s"])
    theorem = all(m == "theorem" for (_, _, m) in verdicts) and bool(verdicts)
    return VanishingReport(knot=data["knot"], n=data["n"], d1=data["d1"],
                           verdicts=verdicts, theorem_mode=theorem,
                           conclusion=data["conclusion"])


def verdict_to_json(v: FillingVerdict) -> dict:
    out = {
        "knot": v.knot,
        "n": v.n,
        "d1": v.d1,
        "verdict": v.verdict,
        "per_s": [],
        "conclusion": v.conclusion,
    }
    if v.report is not None:
        out["per_s"] = [{"s": s, "verdict": vv, "mode": m}
                        for (s, vv, m) in v.report.verdicts]
    return out


def verdict_from_json(data: dict) -> FillingVerdict:
    report = None
    if data.get("per_s"):
        report = report_from_json({
            "knot": data["knot"], "n": data["n"], "d1": data["d1"],
            "per_s": data["per_s"], "conclusion": data["conclusion"],
        })
    return FillingVerdict(knot=data["knot"], n=data["n"], d1=data["d1"],
                          verdict=data["verdict"], report=report,
                          conclusion=data["conclusion"])
