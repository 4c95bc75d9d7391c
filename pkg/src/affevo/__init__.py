"""Affine evolutoids of closed plane curves: affine arclength and curvature,
evolutoid envelopes, their singularities and the discriminant surface."""

from .affine import AffineJetTable, affine_arclength, affine_curvature, affine_jets, affine_normal
from .curves import (
    Ellipse,
    SampledClosed,
    TrigPolynomial,
    affine_image,
    figure_eight,
    parse_curve_arg,
    sample_curve,
    sigma_curve,
)
from .discriminant import build_discriminant_mesh, swallowtail_points, trace_cuspidal_edges
from .errors import AffevoError, InflexionError, NumericalError, UndersampledError
from .evolutoid import Kind, alpha_born, classify_singularity, evolutoid_curve, evolutoid_point, singular_points

__version__ = "0.1.0"

__all__ = [
    "AffineJetTable", "affine_arclength", "affine_curvature", "affine_jets", "affine_normal",
    "Ellipse", "SampledClosed", "TrigPolynomial", "affine_image", "figure_eight",
    "parse_curve_arg", "sample_curve", "sigma_curve",
    "build_discriminant_mesh", "swallowtail_points", "trace_cuspidal_edges",
    "AffevoError", "InflexionError", "NumericalError", "UndersampledError",
    "Kind", "alpha_born", "classify_singularity", "evolutoid_curve", "evolutoid_point",
    "singular_points",
]
