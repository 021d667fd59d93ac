"""
Factory functions for creating configured services.

Settings are layered: module defaults < spec file `options` < environment
variables (PCAP_*) < explicit arguments.
"""

import os
from pathlib import Path
from typing import Callable, Optional

from ..numerics import QuadratureSpec
from ..services import CapacityEngine, ClassifyOptions, ParabolicityService, SubmersionService
from ..services.capacity import DEFAULT_GRID_SIZE
from .specfile import SpecOptions

DEFAULT_LOG_LEVEL = "WARNING"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _load_env_file():
    """Load environment variables from .env file if it exists"""
    env_file = Path(__file__).parent.parent.parent.parent / ".env"
    if env_file.exists():
        with open(env_file, 'r', encoding='utf-8') as f:
            for line in f:
                line = line.strip()
                if line and not line.startswith('#') and '=' in line:
                    key, value = line.split('=', 1)
                    os.environ.setdefault(key.strip(), value.strip())


# Load environment variables
_load_env_file()


def _env_number(name: str, convert: Callable[[str], float], check: Callable[[float], bool], requirement: str):
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return None
    try:
        value = convert(raw.strip())
    except ValueError:
        raise ValueError(f"{name} environment variable must be {requirement}, got '{raw}'")
    if not check(value):
        raise ValueError(f"{name} environment variable must be {requirement}, got '{raw}'")
    return value


def _pick(*values):
    """Last value that is not None"""
    chosen = None
    for value in values:
        if value is not None:
            chosen = value
    return chosen


def create_quadrature_spec(options: Optional[SpecOptions] = None, rel_tol: Optional[float] = None) -> QuadratureSpec:
    """Quadrature settings; PCAP_RELTOL overrides the spec file"""
    options = options or SpecOptions()
    env = _env_number("PCAP_RELTOL", float, lambda x: x > 0.0, "a positive number")
    chosen = _pick(options.rel_tol, env, rel_tol)
    return QuadratureSpec() if chosen is None else QuadratureSpec(rel_tol=chosen)


def create_classify_options(
    options: Optional[SpecOptions] = None, T_max: Optional[float] = None, margin: Optional[float] = None
) -> ClassifyOptions:
    """Criterion settings; PCAP_TMAX and PCAP_MARGIN override the spec file"""
    options = options or SpecOptions()
    env_t_max = _env_number("PCAP_TMAX", float, lambda x: x > 1.0, "a number above 1")
    env_margin = _env_number("PCAP_MARGIN", float, lambda x: x > 0.0, "a positive number")
    defaults = ClassifyOptions()
    return ClassifyOptions(
        T_max=_pick(defaults.T_max, options.T_max, env_t_max, T_max),
        margin=_pick(defaults.margin, options.margin, env_margin, margin),
    )


def create_grid_size(options: Optional[SpecOptions] = None, grid_size: Optional[int] = None) -> int:
    options = options or SpecOptions()
    env = _env_number("PCAP_GRID_SIZE", int, lambda x: x >= 2, "an integer >= 2")
    return _pick(DEFAULT_GRID_SIZE, options.grid_size, env, grid_size)


def create_log_level(level: Optional[str] = None) -> str:
    chosen = (level or os.getenv("PCAP_LOG_LEVEL") or DEFAULT_LOG_LEVEL).upper()
    if chosen not in LOG_LEVELS:
        raise ValueError(f"log level must be one of {LOG_LEVELS}, got '{chosen}'")
    return chosen


def create_capacity_engine(quadrature: Optional[QuadratureSpec] = None) -> CapacityEngine:
    """Create a configured capacity engine"""
    return CapacityEngine(quadrature or create_quadrature_spec())


def create_parabolicity_service(
    quadrature: Optional[QuadratureSpec] = None, options: Optional[ClassifyOptions] = None
) -> ParabolicityService:
    """Create a configured parabolicity service"""
    quadrature = quadrature or create_quadrature_spec()
    return ParabolicityService(
        quadrature, options or create_classify_options(), capacity=CapacityEngine(quadrature)
    )


def create_submersion_service(
    quadrature: Optional[QuadratureSpec] = None, options: Optional[ClassifyOptions] = None
) -> SubmersionService:
    """Create a configured submersion service"""
    criterion = create_parabolicity_service(quadrature, options)
    return SubmersionService(criterion.quadrature, capacity=criterion.capacity, criterion=criterion)
