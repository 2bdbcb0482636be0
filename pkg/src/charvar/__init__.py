"""Numerical SU(2) and SU(r) representation censuses of Heegaard diagrams."""
from .clustering import ComponentReport, cluster_components, match_reports
from .correspondences import (
    CorrespondencePair,
    ElementaryBordism,
    composition_check,
    correspondence_membership,
)
from .errors import (
    CharvarError,
    InvalidElementError,
    MalformedWordError,
    NotInStratumError,
    InvalidParameterError,
    InvalidMoveError,
    DiagramValidationError,
    ShapeError,
    SmoothnessConditionError,
    OutOfNeighborhoodError,
    UnsupportedCompositionError,
    ConfigurationError,
)
from .invariants import (
    Move,
    blowup_triple_check,
    generator_census,
    kunneth_check,
    predict_euler,
    verify_move,
)
from .moduli import (
    ModuliPoint,
    RepresentationPoint,
    ht_embed,
    moduli_dimension,
    pin_gauge,
    relation_residual,
)
from .quaternion import ClassLabel, UnitQuaternion, holonomy, quat_mul, standardize_triple
from .report import canonical_json, read_report, write_report
from .solver import (
    SolutionSet,
    SolverConfig,
    jacobian_kernel_dim,
    refine,
    residual,
    solve_intersection,
)
from .sur import (
    AlcoveLabel,
    SpecialUnitary,
    class_representative,
    genus0_uniqueness,
    mu_label,
    solve_sur,
    sur_census,
    sur_dimension,
    unitary_conjugacy_test,
)
from .words import (
    FreeWord,
    HeegaardDiagram,
    connected_sum,
    h1_invariants,
    handleslide,
    lens,
    s2xs1,
    s3_genus,
    stabilize,
    validate_diagram,
)

__all__ = [
    "AlcoveLabel",
    "CharvarError",
    "ClassLabel",
    "ComponentReport",
    "ConfigurationError",
    "CorrespondencePair",
    "DiagramValidationError",
    "ElementaryBordism",
    "FreeWord",
    "HeegaardDiagram",
    "InvalidElementError",
    "InvalidMoveError",
    "InvalidParameterError",
    "MalformedWordError",
    "ModuliPoint",
    "Move",
    "NotInStratumError",
    "OutOfNeighborhoodError",
    "RepresentationPoint",
    "ShapeError",
    "SmoothnessConditionError",
    "SolutionSet",
    "SolverConfig",
    "SpecialUnitary",
    "UnitQuaternion",
    "UnsupportedCompositionError",
    "blowup_triple_check",
    "canonical_json",
    "class_representative",
    "cluster_components",
    "composition_check",
    "connected_sum",
    "correspondence_membership",
    "generator_census",
    "genus0_uniqueness",
    "h1_invariants",
    "handleslide",
    "holonomy",
    "ht_embed",
    "jacobian_kernel_dim",
    "kunneth_check",
    "lens",
    "match_reports",
    "moduli_dimension",
    "mu_label",
    "pin_gauge",
    "predict_euler",
    "quat_mul",
    "read_report",
    "refine",
    "relation_residual",
    "residual",
    "s2xs1",
    "s3_genus",
    "solve_intersection",
    "solve_sur",
    "stabilize",
    "standardize_triple",
    "sur_census",
    "sur_dimension",
    "unitary_conjugacy_test",
    "validate_diagram",
    "verify_move",
    "write_report",
]
