"""Sparse temporal disaggregation of low-frequency series with many indicators."""

from ._sparsetd import (
    DisaggResult,
    IdentifiabilityError,
    InputError,
    NumericalError,
    PathAction,
    PathStep,
    SolutionPath,
    aggregation_matrix,
    ar1_covariance,
    chowlin_fit,
    disaggregate,
    lars_path,
    simulate,
    sptd_fit,
    whitening_transform,
)

__version__ = "0.1.0"

__all__ = [
    "DisaggResult",
    "IdentifiabilityError",
    "InputError",
    "NumericalError",
    "PathAction",
    "PathStep",
    "SolutionPath",
    "aggregation_matrix",
    "ar1_covariance",
    "chowlin_fit",
    "disaggregate",
    "lars_path",
    "simulate",
    "sptd_fit",
    "whitening_transform",
]
