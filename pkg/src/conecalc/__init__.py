"""conecalc: a knot Floer surgery calculator over F2[U].

From a finite model of the full knot Floer complex the package computes
the V/H invariants and the correction term of +1 surgery, the graded minus
Floer homology of every positive integer surgery via the truncated mapping
cone, the induced classes of the two-handle trace cobordism maps, and the
resulting symplectic-filling obstruction for the trace.  A separate module
decides when an integral linking form splits as identity-plus-zero blocks.
"""

from .cfk import (
    BUILTIN_NAMES,
    ComplexError,
    Generator,
    KnotComplex,
    MissingFlipError,
    Term,
    ValidationReport,
    builtin,
    default_flip,
    genus,
    mirror,
    parse,
    parse_file,
    staircase_from_alexander,
    validate,
)
from .cobordism import (
    FillingVerdict,
    SpincLabel,
    TraceMapClass,
    VanishingReport,
    obstruct_filling,
    trace_map_class,
    vanishing_report,
)
from .f2u import (
    GradedModule,
    HomologyPresentation,
    MalformedComplexError,
    MonomialMatrix,
    SmithForm,
    boundary_membership_f2,
    class_is_zero,
    f2_homology_dimensions,
    homology,
    induced_map,
    snf,
)
from .lattice import (
    HandleSplitReport,
    SymIntMatrix,
    e8_gram_matrix,
    handle_split_report,
    is_standard_diagonal,
    norm_one_vector,
    nullity_split,
)
from .surgery import (
    SurgeryCone,
    SurgeryHomology,
    VHTable,
    build_surgery_cone,
    d_invariant_one_surgery,
    grading_shift,
    h_invariant,
    halfplane_complex,
    quadrant_complex,
    surgery_homology,
    truncation_stability,
    v_invariant,
    vh_table,
)

__all__ = [
    "BUILTIN_NAMES", "ComplexError", "Generator", "KnotComplex",
    "MissingFlipError", "Term", "ValidationReport", "builtin", "default_flip",
    "genus", "mirror", "parse", "parse_file", "staircase_from_alexander",
    "validate",
    "FillingVerdict", "SpincLabel", "TraceMapClass", "VanishingReport",
    "obstruct_filling", "trace_map_class", "vanishing_report",
    "GradedModule", "HomologyPresentation", "MalformedComplexError",
    "MonomialMatrix", "SmithForm", "boundary_membership_f2", "class_is_zero",
    "f2_homology_dimensions", "homology", "induced_map", "snf",
    "HandleSplitReport", "SymIntMatrix", "e8_gram_matrix",
    "handle_split_report", "is_standard_diagonal", "norm_one_vector",
    "nullity_split",
    "SurgeryCone", "SurgeryHomology", "VHTable", "build_surgery_cone",
    "d_invariant_one_surgery", "grading_shift", "h_invariant",
    "halfplane_complex", "quadrant_complex", "surgery_homology",
    "truncation_stability", "v_invariant", "vh_table",
]

__version__ = "0.1.0"
