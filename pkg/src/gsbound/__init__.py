"""Tight upper bounds on generalized Svetlichny operators for N-qubit states."""
from __future__ import annotations

from .bounds import (
    BoundReport,
    TightnessCertificate,
    classical_bound,
    gs_upper_bound,
    state_bound,
    tightness_certificate,
    violation_verdict,
)
from .correlation import CorrelationMatrix, CorrelationTensor, correlation_matrix, correlation_tensor
from .optimizer import OptimizationResult, maximize_expectation
from .states import DensityMatrix, PureState, SchemaError, StateError
from .svetlichny import DimensionError, MeasurementSetting, SettingsProfile

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "CorrelationMatrix",
    "CorrelationTensor",
    "DensityMatrix",
    "DimensionError",
    "MeasurementSetting",
    "OptimizationResult",
    "PureState",
    "SchemaError",
    "SettingsProfile",
    "StateError",
    "TightnessCertificate",
    "classical_bound",
    "correlation_matrix",
    "correlation_tensor",
    "gs_upper_bound",
    "maximize_expectation",
    "state_bound",
    "tightness_certificate",
    "violation_verdict",
]
