"""Exact finite metric geometry: bi-Lipschitz extension and matching, rational
Urysohn levels, Cantor-tree incomparability and chain ratio profiles."""

from .errors import BudgetError, InputError, PreconditionError, UrykitError
from .metric import (
    INFINITE,
    FiniteMetricSpace,
    PartialMap,
    ValidationReport,
    WeightedGraph,
    distortion,
    is_ultrametric,
    path_completion,
    spectrum,
    validate_metric,
)

__all__ = [
    "BudgetError",
    "FiniteMetricSpace",
    "INFINITE",
    "InputError",
    "PartialMap",
    "PreconditionError",
    "UrykitError",
    "ValidationReport",
    "WeightedGraph",
    "distortion",
    "is_ultrametric",
    "path_completion",
    "spectrum",
    "validate_metric",
]
