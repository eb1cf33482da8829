"""Histogram cubic-spline probability density estimation.

Workflow: pick a bin count (:func:`select_bin_count`), histogram the
samples, interpolate the cumulative bin masses with a cubic spline under
a boundary condition, and differentiate the spline to get a smooth,
evaluable density (:func:`estimate_pdf`).  A synthetic emergency-braking
corpus generator (:mod:`histospline.datagen`) provides validation data,
and :mod:`histospline.cli` wraps the workflows for the command line.
"""

from .datagen import (
    DEFAULT_RANGES,
    BrakingScenario,
    ScenarioRanges,
    TimeSeries,
    flatten_positions,
    generate_corpus,
    simulate_braking,
)
from .errors import (
    DataError,
    DisjointSupportsError,
    HistosplineError,
    NumericError,
    OutOfSupportError,
)
from .estimator import (
    CumulativeProfile,
    PdfEstimate,
    count_turning_points,
    cumulative_masses,
    estimate_from_histogram,
    estimate_pdf,
    grid_kl,
    kl_divergence,
    quadrature_normalization,
)
from .histogram import (
    BinRule,
    Histogram,
    Samples,
    build_histogram,
    knuth_log_posterior,
    select_bin_count,
)
from .spline import (
    Boundary,
    CubicSplineModel,
    as_knot_vector,
    bspline_basis,
    bspline_basis_derivative,
    fit_interpolating_spline,
)

__version__ = "0.1.0"

__all__ = [
    "BinRule",
    "Boundary",
    "BrakingScenario",
    "CubicSplineModel",
    "CumulativeProfile",
    "DEFAULT_RANGES",
    "DataError",
    "DisjointSupportsError",
    "Histogram",
    "HistosplineError",
    "NumericError",
    "OutOfSupportError",
    "PdfEstimate",
    "Samples",
    "ScenarioRanges",
    "TimeSeries",
    "as_knot_vector",
    "bspline_basis",
    "bspline_basis_derivative",
    "build_histogram",
    "count_turning_points",
    "cumulative_masses",
    "estimate_from_histogram",
    "estimate_pdf",
    "fit_interpolating_spline",
    "flatten_positions",
    "generate_corpus",
    "grid_kl",
    "kl_divergence",
    "knuth_log_posterior",
    "quadrature_normalization",
    "select_bin_count",
    "simulate_braking",
]
