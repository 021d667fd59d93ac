"""Spec-file loading and environment-driven service factories"""

from .factory import (
    create_capacity_engine,
    create_classify_options,
    create_grid_size,
    create_log_level,
    create_parabolicity_service,
    create_quadrature_spec,
    create_submersion_service,
)
from .specfile import ManifoldSpecFile, SpecOptions, load_spec, parse_spec

__all__ = [
    "ManifoldSpecFile",
    "SpecOptions",
    "load_spec",
    "parse_spec",
    "create_quadrature_spec",
    "create_classify_options",
    "create_grid_size",
    "create_log_level",
    "create_capacity_engine",
    "create_parabolicity_service",
    "create_submersion_service",
]
