"""Numerical workbench for exact cosmological solutions of general relativity.

Submodules: :mod:`manifold` (charts, jets), :mod:`curvature`,
:mod:`catalog` (exact solutions), :mod:`flrw`, :mod:`optics`,
:mod:`causal` (forms, kinematics, Killing fields, closed curves),
:mod:`newtonian` and :mod:`cli`.
"""

from .catalog import CatalogEntry, SourceModel, all_entries, make_entry, sample_events
from .curvature import curvature_at, efe_residual, integrate_geodesic
from .errors import (DegenerateMetricError, DomainError, ExtensionRegionError, InconsistentInitialDataError,
                     InvalidInputError, MixedCausalTypeError, RelCosmoError, SingularApproachError,
                     SingularStateError, UnknownEntryError, UnsupportedMetricError)
from .flrw import Dust, FLRWParams, integrate_scale_factor
from .manifold import Jet2, MetricSpec, classify_vector, evaluate_metric, jet, metric_inverse, numeric_jet

__version__ = "0.1.0"

__all__ = [
    "CatalogEntry", "SourceModel", "all_entries", "make_entry", "sample_events",
    "curvature_at", "efe_residual", "integrate_geodesic",
    "DegenerateMetricError", "DomainError", "ExtensionRegionError", "InconsistentInitialDataError",
    "InvalidInputError", "MixedCausalTypeError", "RelCosmoError", "SingularApproachError",
    "SingularStateError", "UnknownEntryError", "UnsupportedMetricError",
    "Dust", "FLRWParams", "integrate_scale_factor",
    "Jet2", "MetricSpec", "classify_vector", "evaluate_metric", "jet", "metric_inverse", "numeric_jet",
]
