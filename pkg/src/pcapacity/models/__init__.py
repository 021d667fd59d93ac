"""
Data models and type definitions for the p-capacity engine.

This module contains the geometric value types (model manifolds, flux
densities, submersion data) and the TypedDict records returned by the
services.
"""

from .geometry import (
    FluxDensity,
    ModelManifold,
    SubmersionSpec,
    base_manifold,
    criterion_inner,
    criterion_inner_log,
    flux_density,
    log_sphere_area,
    sphere_area,
)
from .types import (
    BoundCheck,
    CapacityEstimate,
    ConvergenceReport,
    CrossCheck,
    DecayReport,
    LimitReport,
    ResultRecord,
    SweepRow,
    SweepTable,
    Verdict,
)

__all__ = [
    # Geometry
    "ModelManifold",
    "FluxDensity",
    "SubmersionSpec",
    "base_manifold",
    "flux_density",
    "criterion_inner",
    "criterion_inner_log",
    "sphere_area",
    "log_sphere_area",

    # Result records
    "CapacityEstimate",
    "LimitReport",
    "Verdict",
    "SweepRow",
    "SweepTable",
    "CrossCheck",
    "BoundCheck",
    "DecayReport",
    "ConvergenceReport",
    "ResultRecord",
]
