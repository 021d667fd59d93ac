"""Numerical building blocks: quadrature, Newton iteration, tail regressions"""

from .newton import NewtonResult, damped_newton
from .quadrature import (
    LogQuadratureResult,
    QuadratureResult,
    QuadratureSpec,
    integrate,
    integrate_log,
)
from .regression import LineFit, fit_line

__all__ = [
    "QuadratureSpec",
    "QuadratureResult",
    "LogQuadratureResult",
    "integrate",
    "integrate_log",
    "NewtonResult",
    "damped_newton",
    "LineFit",
    "fit_line",
]
