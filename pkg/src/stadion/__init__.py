"""Semiclassical quantization of the stadium billiard through enveloping rational polygons."""

from .diophantine import Approximation, dirichlet_search, min_Z_for_accuracy, step_function
from .presets import CaseConfig, ConfigError, load_case, load_case_file
from .semiclassics import (ModeNumbers, SwfModel, SwfSpec, boundary_residual, build_swf, diagonal_residual, energy,
                           nodal_distance, poc_spectrum, quantize_momentum, spectrum_accuracy_report)
from .stadium_geometry import OrbitTangentSet, PolygonEnvelope, StadiumSpec, build_envelope, envelope_accuracy_bound
from .trigfield import FieldElement, inverse, mul
from .unfolding import build_epp, case_epp, enumerate_periods, genus, quarter_polygon, summarize

__version__ = "0.1.0"
