"""
Adaptive composite Simpson quadrature for smooth positive integrands on [a, b].

The interval is first cut into geometric panels (the integrands here are
power-like in t), then the panel with the largest error estimate is halved
until the summed estimate meets the relative tolerance. Splitting order is
fixed by (error, left endpoint), so results are bitwise reproducible.

`integrate_log` takes log f instead of f and returns log ∫ f, scaling the
integrand by its largest sampled value so that e^{±700} never appears.
"""

import heapq
import math
import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from ..errors import QuadratureError

logger = logging.getLogger(__name__)

DEFAULT_REL_TOL = 1e-10
DEFAULT_MAX_SUBDIVISIONS = 2 ** 20
SCHEMES = ("adaptive-composite",)

# exp() overflows above ~709.78
MAX_EXPONENT = 700.0


@dataclass(frozen=True)
class QuadratureSpec:
    scheme: str = "adaptive-composite"
    rel_tol: float = DEFAULT_REL_TOL
    max_subdivisions: int = DEFAULT_MAX_SUBDIVISIONS
    log_domain: bool = True

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"Unknown quadrature scheme '{self.scheme}', expected one of {SCHEMES}")
        if not self.rel_tol > 0.0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_subdivisions < 1:
            raise ValueError(f"max_subdivisions must be >= 1, got {self.max_subdivisions}")


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int
    subdivisions: int

    @property
    def relative_error(self) -> float:
        return self.error_estimate / abs(self.value) if self.value else 0.0


@dataclass(frozen=True)
class LogQuadratureResult:
    log_value: float
    relative_error: float
    evaluations: int
    subdivisions: int


def panel_edges(a: float, b: float) -> np.ndarray:
    """Initial panels: one per doubling of t when a > 0, else two uniform panels"""
    if a > 0.0:
        count = max(1, int(math.ceil(math.log2(b / a) - 1e-12)))
        edges = np.geomspace(a, b, count + 1)
    else:
        edges = np.linspace(a, b, 3)
    edges[0] = a
    edges[-1] = b
    return edges


# Interval record: (a, b, fa, f_lm, fm, f_rm, fb, estimate, error)
Interval = Tuple[float, float, float, float, float, float, float, float, float]


def _simpson(h: float, fa: float, fm: float, fb: float) -> float:
    return h / 6.0 * (fa + 4.0 * fm + fb)


def _make_interval(a: float, b: float, fa: float, f_lm: float, fm: float, f_rm: float, fb: float) -> Interval:
    m = 0.5 * (a + b)
    whole = _simpson(b - a, fa, fm, fb)
    halves = _simpson(m - a, fa, f_lm, fm) + _simpson(b - m, fm, f_rm, fb)
    delta = halves - whole
    return (a, b, fa, f_lm, fm, f_rm, fb, halves + delta / 15.0, abs(delta) / 15.0)


def _adaptive_simpson(
    func: Callable[[float], float],
    edges: Sequence[float],
    rel_tol: float,
    max_subdivisions: int,
) -> Tuple[float, float, int, int]:
    evaluations = 0

    def f(t: float) -> float:
        nonlocal evaluations
        evaluations += 1
        return func(t)

    heap: List[Tuple[float, float, int]] = []
    intervals: Dict[int, Interval] = {}
    finished: List[Interval] = []
    next_id = 0

    def push(interval: Interval) -> None:
        nonlocal next_id
        intervals[next_id] = interval
        heapq.heappush(heap, (-interval[8], interval[0], next_id))
        next_id += 1

    f_edges = [f(float(x)) for x in edges]
    for i in range(len(edges) - 1):
        a, b = float(edges[i]), float(edges[i + 1])
        m = 0.5 * (a + b)
        push(_make_interval(a, b, f_edges[i], f(0.5 * (a + m)), f(m), f(0.5 * (m + b)), f_edges[i + 1]))

    total = math.fsum(iv[7] for iv in intervals.values())
    error = math.fsum(iv[8] for iv in intervals.values())
    subdivisions = 0

    while heap and error > rel_tol * abs(total):
        if subdivisions >= max_subdivisions:
            raise QuadratureError(
                f"Subdivision limit {max_subdivisions} reached on [{edges[0]}, {edges[-1]}] "
                f"(estimate {total}, error {error})",
                partial_value=total,
                error_estimate=error,
            )
        _, _, key = heapq.heappop(heap)
        a, b, fa, f_lm, fm, f_rm, fb, estimate, err = intervals.pop(key)
        m = 0.5 * (a + b)
        if not (a < 0.5 * (a + m) < m < 0.5 * (m + b) < b):
            # interval below float resolution; keep it as is
            finished.append((a, b, fa, f_lm, fm, f_rm, fb, estimate, err))
            continue
        left = _make_interval(a, m, fa, f(0.5 * (a + 0.5 * (a + m))), f_lm, f(0.5 * (0.5 * (a + m) + m)), fm)
        right = _make_interval(m, b, fm, f(0.5 * (m + 0.5 * (m + b))), f_rm, f(0.5 * (0.5 * (m + b) + b)), fb)
        push(left)
        push(right)
        subdivisions += 1
        total += left[7] + right[7] - estimate
        error += left[8] + right[8] - err
        if error <= rel_tol * abs(total):
            # guard against drift in the running sums
            everything = list(intervals.values()) + finished
            total = math.fsum(iv[7] for iv in everything)
            error = math.fsum(iv[8] for iv in everything)

    everything = sorted(list(intervals.values()) + finished)
    total = math.fsum(iv[7] for iv in everything)
    error = math.fsum(iv[8] for iv in everything)
    if error > rel_tol * abs(total):
        raise QuadratureError(
            f"Tolerance {rel_tol} not reachable on [{edges[0]}, {edges[-1]}] "
            f"(estimate {total}, error {error})",
            partial_value=total,
            error_estimate=error,
        )
    return total, error, evaluations, subdivisions


def integrate(
    func: Callable[[float], float],
    a: float,
    b: float,
    spec: QuadratureSpec = QuadratureSpec(),
) -> QuadratureResult:
    """∫_a^b func(t) dt for a smooth non-negative integrand"""
    if not b > a:
        raise ValueError(f"Integration interval must satisfy a < b, got [{a}, {b}]")
    total, error, evaluations, subdivisions = _adaptive_simpson(
        func, panel_edges(a, b), spec.rel_tol, spec.max_subdivisions
    )
    logger.debug(f"Integrated on [{a}, {b}]: {total} (error {error}, {evaluations} evaluations)")
    return QuadratureResult(total, error, evaluations, subdivisions)


def integrate_log(
    log_func: Callable[[float], float],
    a: float,
    b: float,
    spec: QuadratureSpec = QuadratureSpec(),
) -> LogQuadratureResult:
    """log ∫_a^b exp(log_func(t)) dt, stable when the integrand under/overflows"""
    if not b > a:
        raise ValueError(f"Integration interval must satisfy a < b, got [{a}, {b}]")
    edges = panel_edges(a, b)

    if not spec.log_domain:
        def linear(t: float) -> float:
            try:
                return math.exp(log_func(t))
            except OverflowError:
                raise QuadratureError(f"Integrand overflows at t={t}; enable log_domain")

        result = integrate(linear, a, b, spec)
        if result.value <= 0.0:
            raise QuadratureError(f"Integral on [{a}, {b}] underflows to zero; enable log_domain")
        return LogQuadratureResult(
            math.log(result.value), result.relative_error, result.evaluations, result.subdivisions
        )

    # sample the initial nodes once to pick the scaling
    cache: Dict[float, float] = {}
    for i in range(len(edges) - 1):
        lo, hi = float(edges[i]), float(edges[i + 1])
        mid = 0.5 * (lo + hi)
        for t in (lo, 0.5 * (lo + mid), mid, 0.5 * (mid + hi), hi):
            if t not in cache:
                cache[t] = log_func(t)
    shift = max(cache.values())

    def scaled(t: float) -> float:
        log_value = cache.pop(t) if t in cache else log_func(t)
        exponent = log_value - shift
        if exponent > MAX_EXPONENT:
            raise QuadratureError(f"Integrand exceeds its sampled scale by e^{exponent:.1f} at t={t}")
        return math.exp(exponent)

    total, error, evaluations, subdivisions = _adaptive_simpson(
        scaled, edges, spec.rel_tol, spec.max_subdivisions
    )
    if total <= 0.0:
        raise QuadratureError(f"Scaled integral on [{a}, {b}] is not positive ({total})")
    log_value = shift + math.log(total)
    logger.debug(
        f"Integrated (log domain) on [{a}, {b}]: log value {log_value} "
        f"(relative error {error / total}, {evaluations} evaluations)"
    )
    return LogQuadratureResult(log_value, error / total, evaluations, subdivisions)
