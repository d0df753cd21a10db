"""Voronoi cells of real algebraic varieties.

Exact computation of the algebraic Voronoi boundary at a point, mod-p degree
experiments, closed-form degree counts, nearest-point membership for low-rank
matrix sets, and spectrahedral inner approximations of Voronoi cells.
"""
from .degrees import (
    DegreeExperiment,
    TABLE_HOMOGENEOUS,
    TABLE_INHOMOGENEOUS,
    conjecture_hypersurface,
    formula_cone,
    formula_curve,
    formula_surface,
    hypersurface_degree_experiment,
    lowrank_voronoi_degree,
    plane_curve_genus,
    random_hypersurface,
    voronoi_degree_modp,
)
from .exactmath import (
    GREVLEX,
    LEX,
    ParseError,
    PolyRing,
    Polynomial,
    QQ,
    count_real_roots,
    isolate_real_roots,
    parse_polynomial,
)
from .groebner import (
    BudgetExhaustedError,
    GroebnerBasis,
    IdealSpec,
    eliminate,
    groebner_basis,
    intersect,
    is_zero_dimensional,
    normal_form,
    quotient_degree,
    saturate,
)
from .lowrank import (
    SVDFactors,
    cell_membership,
    describe_cell,
    eckart_young_truncate,
    spectral_ball_membership,
    spectral_norm,
    svd,
    symmetric_frobenius_membership,
)
from .sdp import (
    LMIFeasibilityProblem,
    LMIResult,
    MembershipResult,
    QuadricSystem,
    VeroneseLift,
    hessian,
    level1_membership,
    leveld_membership,
    lmi_feasible,
    veronese_lift,
)
from .voronoi import (
    CodimensionError,
    NormalLineSection,
    PointNotOnVarietyError,
    SingularPointError,
    VoronoiReport,
    augmented_jacobian,
    boundary_on_normal_line,
    critical_ideal,
    normal_bundle_ideal,
    normal_space_at,
    voronoi_ideal,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "QQ",
    "GREVLEX",
    "LEX",
    "ParseError",
    "PolyRing",
    "Polynomial",
    "parse_polynomial",
    "count_real_roots",
    "isolate_real_roots",
    "BudgetExhaustedError",
    "GroebnerBasis",
    "IdealSpec",
    "groebner_basis",
    "normal_form",
    "eliminate",
    "saturate",
    "intersect",
    "is_zero_dimensional",
    "quotient_degree",
    "PointNotOnVarietyError",
    "SingularPointError",
    "CodimensionError",
    "VoronoiReport",
    "NormalLineSection",
    "augmented_jacobian",
    "normal_bundle_ideal",
    "normal_space_at",
    "critical_ideal",
    "voronoi_ideal",
    "boundary_on_normal_line",
    "DegreeExperiment",
    "TABLE_INHOMOGENEOUS",
    "TABLE_HOMOGENEOUS",
    "formula_curve",
    "formula_surface",
    "formula_cone",
    "plane_curve_genus",
    "conjecture_hypersurface",
    "lowrank_voronoi_degree",
    "random_hypersurface",
    "voronoi_degree_modp",
    "hypersurface_degree_experiment",
    "SVDFactors",
    "svd",
    "spectral_norm",
    "eckart_young_truncate",
    "describe_cell",
    "cell_membership",
    "spectral_ball_membership",
    "symmetric_frobenius_membership",
    "QuadricSystem",
    "VeroneseLift",
    "LMIFeasibilityProblem",
    "LMIResult",
    "MembershipResult",
    "hessian",
    "veronese_lift",
    "lmi_feasible",
    "level1_membership",
    "leveld_membership",
]
