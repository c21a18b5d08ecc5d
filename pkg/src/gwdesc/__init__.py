"""Exact genus-zero descendant correlators from finite quantum-cohomology input."""

from .exact import (
    CurveClass,
    NovikovSeries,
    PolicyMismatchError,
    Rational,
    TruncationPolicy,
    antiderivative_q,
    derivative_q,
    format_rational,
    parse_rational,
)
from .geometry import (
    CohClass,
    DualBases,
    GeometryModel,
    ModelError,
    ValidationReport,
    load_geometry,
    validate_model,
)
from .moduli import (
    TautTable,
    TautTableError,
    constant_map_correlator,
    psi_boundary_partitions,
    psi_integral_genus0,
)
from .engine import (
    CorrelatorEngine,
    PrimaryTable,
    ReconstructionError,
    TableFormatError,
    UnsupportedQueryError,
)
from .fixtures import FixtureModel, load_fixture, plane_curve_counts
from .phase import (
    PhaseTransform,
    PotentialSeries,
    SeriesClass,
    build_transform,
    compose_with_transform,
    potential_modified,
    potential_primary,
    potential_standard,
    quantum_product,
    summed_correlator,
    summed_two_point,
    transform_identity_report,
    two_point_contraction,
    two_point_from_primaries,
)

__version__ = "0.1.0"

__all__ = [
    "CohClass",
    "CorrelatorEngine",
    "CurveClass",
    "DualBases",
    "FixtureModel",
    "GeometryModel",
    "ModelError",
    "NovikovSeries",
    "PhaseTransform",
    "PolicyMismatchError",
    "PotentialSeries",
    "PrimaryTable",
    "Rational",
    "ReconstructionError",
    "SeriesClass",
    "TableFormatError",
    "TautTable",
    "TautTableError",
    "TruncationPolicy",
    "UnsupportedQueryError",
    "ValidationReport",
    "antiderivative_q",
    "build_transform",
    "compose_with_transform",
    "constant_map_correlator",
    "derivative_q",
    "format_rational",
    "load_fixture",
    "load_geometry",
    "parse_rational",
    "plane_curve_counts",
    "potential_modified",
    "potential_primary",
    "potential_standard",
    "psi_boundary_partitions",
    "psi_integral_genus0",
    "quantum_product",
    "summed_correlator",
    "summed_two_point",
    "transform_identity_report",
    "two_point_contraction",
    "two_point_from_primaries",
    "validate_model",
]
