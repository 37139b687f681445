"""Quasi-distribution appraisal of finite element displacement results.

Nodal displacements are reduced to 1-norm magnitudes, binned into an
equal-width histogram, fitted with a two-segment piecewise Bezier curve,
normalized to unit area and scored by the variance of the resulting
density. Lower variance ranks a design case higher.
"""

__version__ = "0.1.0"

from .bezier import (
    BasisConfig,
    PiecewiseBezierCurve,
    basis_eval,
    basis_matrix,
    basis_row,
    curve_eval,
    curve_sample,
)
from .errors import NumericError, ParseError, QuasiDistError
from .fitting import (
    FittedCurve,
    SampledSignal,
    assemble_design_matrix,
    chord_length_parameterize,
    fit_curve,
    mse,
    omega_grid,
    resample_to_signal,
    select_omega,
    solve_least_squares,
)
from .histogram import HistogramDistribution, build_histogram, histogram_points
from .ingest import (
    DeformationMagnitudes,
    DisplacementField,
    NodeDisplacement,
    displacement_norm,
    field_magnitudes,
    format_displacement_csv,
    parse_displacement_csv,
    read_displacement_csv,
)
from .kernels import BACKEND
from .quasi import (
    FitConfig,
    FitReport,
    QuasiDistribution,
    curve_area,
    distribution_variance,
    evaluate_case,
    normalize,
    rank_cases,
)
from .synth import GaussianMixture, LogNormal, SynthSpec, Uniform, generate_field, generate_from_curve
