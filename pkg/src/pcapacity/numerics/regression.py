"""
Least-squares line fits used for tail asymptotics.
"""

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy import stats

CONFIDENCE = 0.95
# relative spread of y below which a sample is treated as constant
FLAT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class LineFit:
    slope: float
    intercept: float
    r2: float
    slope_ci: Tuple[float, float]
    flat: bool


def fit_line(x: Sequence[float], y: Sequence[float], confidence: float = CONFIDENCE) -> LineFit:
    """Fit y ≈ slope·x + intercept; constant y gives slope 0 and r2 = 1"""
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if xs.size < 3:
        raise ValueError(f"Need at least 3 points for a line fit, got {xs.size}")
    spread = float(np.max(ys) - np.min(ys))
    if spread <= FLAT_TOLERANCE * (1.0 + float(np.max(np.abs(ys)))):
        mean = float(np.mean(ys))
        return LineFit(0.0, mean, 1.0, (0.0, 0.0), True)

    result = stats.linregress(xs, ys)
    slope = float(result.slope)
    r2 = float(result.rvalue) ** 2
    stderr = float(result.stderr)
    if not math.isfinite(stderr):
        stderr = 0.0
    quantile = float(stats.t.ppf(0.5 + confidence / 2.0, xs.size - 2))
    half_width = quantile * stderr
    return LineFit(slope, float(result.intercept), r2, (slope - half_width, slope + half_width), False)
