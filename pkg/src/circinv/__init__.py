"""Circular-area integral invariant of closed planar curves.

For each point of a closed curve, the invariant is the area of the
radius-r disk centered there intersected with the curve's interior.
The package computes the invariant both geometrically (disk against a
polygon approximation) and analytically (chord-integral form), provides
its directional derivative with the circle-case spectral theory, inverts
the invariant near the circle by Gauss-Newton, and estimates the
stability constant empirically.
"""

from .backend import USE_NUMBA, backend_name
from .curves import (
    Curve,
    TangentField,
    curvature,
    curve_ck_dist,
    curve_from_dict,
    curve_to_dict,
    evaluate,
    evaluate_d1,
    evaluate_d2,
    lift_normal,
    load_curve,
    make_circle,
    normalization_residuals,
    normalize,
    sample_perturbed_circle,
    save_curve,
    tangent_decompose,
)
from .derivative import (
    OperatorMatrix,
    Spectrum,
    assemble_operator,
    circle_derivative,
    frechet_derivative,
    injectivity_margin,
    sine_inequality_check,
    spectrum_d,
)
from .errors import (
    CircinvError,
    ConsistencyError,
    ConvergenceError,
    DegenerateCurveError,
    DomainError,
    EmbeddingError,
    GeometryError,
    NearSingularError,
    ParameterError,
    TangencyWarning,
    TopologyError,
)
from .fourier import PeriodicFn, uniform_grid
from .invariant import (
    IntersectionPair,
    InvarianceReport,
    InvariantProfile,
    intersection_count,
    intersection_params,
    invariance_suite,
    invariant_analytic,
    invariant_oracle,
    theta_circle,
)
from .reconstruct import (
    ReconstructionProblem,
    StabilityReport,
    reconstruct,
    stability_estimate,
)

__version__ = "0.1.0"

__all__ = [
    "USE_NUMBA",
    "backend_name",
    "Curve",
    "TangentField",
    "curvature",
    "curve_ck_dist",
    "curve_from_dict",
    "curve_to_dict",
    "evaluate",
    "evaluate_d1",
    "evaluate_d2",
    "lift_normal",
    "load_curve",
    "make_circle",
    "normalization_residuals",
    "normalize",
    "sample_perturbed_circle",
    "save_curve",
    "tangent_decompose",
    "OperatorMatrix",
    "Spectrum",
    "assemble_operator",
    "circle_derivative",
    "frechet_derivative",
    "injectivity_margin",
    "sine_inequality_check",
    "spectrum_d",
    "CircinvError",
    "ConsistencyError",
    "ConvergenceError",
    "DegenerateCurveError",
    "DomainError",
    "EmbeddingError",
    "GeometryError",
    "NearSingularError",
    "ParameterError",
    "TangencyWarning",
    "TopologyError",
    "PeriodicFn",
    "uniform_grid",
    "IntersectionPair",
    "InvarianceReport",
    "InvariantProfile",
    "intersection_count",
    "intersection_params",
    "invariance_suite",
    "invariant_analytic",
    "invariant_oracle",
    "theta_circle",
    "ReconstructionProblem",
    "StabilityReport",
    "reconstruct",
    "stability_estimate",
    "__version__",
]
