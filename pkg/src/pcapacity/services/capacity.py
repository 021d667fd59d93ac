"""
Capacity engine: Cap_p(D, D_R) for the core D = B_a ×_f L of a model manifold.

Two independent routes are implemented:

- flux: the closed form [∫_a^R S(t)^{1/(1-p)} dt]^{1-p}, integrated in log
  space so Gaussian warps neither underflow nor overflow;
- variational: direct minimization of the discrete radial p-energy
  Σ |Δu_i/Δt_i|^p S(t̄_i) Δt_i with u(a) = 1, u(R) = 0, by damped Newton.

The exhaustion limit R → ∞ is read off the flux integral along a schedule.
"""

import math
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from ..errors import CapacityError, ConvergenceError, GridError, QuadratureError
from ..models.geometry import FluxDensity, ModelManifold
from ..models.types import CapacityEstimate, LimitReport
from ..numerics import LogQuadratureResult, NewtonResult, QuadratureSpec, damped_newton, fit_line, integrate_log
from ..numerics.newton import DEFAULT_GRAD_TOL, DEFAULT_MAX_ITER

logger = logging.getLogger(__name__)

MIN_P = 1.0 + 1e-3
DEFAULT_GRID_SIZE = 2000
DEFAULT_LIMIT_FLOOR = 1e-8
DEFAULT_STABILIZATION = 1e-6
DEFAULT_DIVERGENCE_BAND = 1e-3
DEFAULT_R_SCHEDULE = (1e1, 1e2, 1e4, 1e8, 1e16)

# scaled weights below this are indistinguishable from zero in the Newton system
_WEIGHT_FLOOR = 1e-290
# continuation steps in q = 1/(p-1) for p < 2
_CONTINUATION_STEP = 0.25
_CONTINUATION_MIN_STEP = 1e-3
_BRACKET_STEPS = 200


def validate_p(p: float) -> None:
    if not p > 1.0:
        raise CapacityError(f"p must exceed 1, got {p}")
    if p < MIN_P:
        raise CapacityError(f"p must be at least {MIN_P} (the exponent 1/(1-p) blows up near 1), got {p}")


@dataclass(frozen=True)
class LimitOptions:
    """Thresholds of capacity_limit.

    divergence_band: relative band below the logarithmic increment ratio
    still read as a divergent flux integral.
    """

    floor: float = DEFAULT_LIMIT_FLOOR
    stabilization: float = DEFAULT_STABILIZATION
    divergence_band: float = DEFAULT_DIVERGENCE_BAND

    def __post_init__(self):
        if not self.floor >= 0.0:
            raise ValueError(f"floor must be non-negative, got {self.floor}")
        if not self.stabilization > 0.0:
            raise ValueError(f"stabilization must be positive, got {self.stabilization}")
        if not 0.0 <= self.divergence_band < 1.0:
            raise ValueError(f"divergence_band must lie in [0, 1), got {self.divergence_band}")


@dataclass(frozen=True)
class VariationalSolution:
    estimate: CapacityEstimate
    nodes: np.ndarray
    values: np.ndarray
    iterations: int


class OptimalProfile:
    """Continuum minimizer u(t) = ∫_t^R S^{1/(1-p)} / ∫_a^R S^{1/(1-p)} on [a, R]"""

    def __init__(self, engine: "CapacityEngine", manifold: ModelManifold, p: float, R: float, inner_radius: float):
        self.engine = engine
        self.manifold = manifold
        self.p = p
        self.R = R
        self.inner_radius = inner_radius
        self.density = FluxDensity(manifold)
        self.log_total = engine.log_flux_integral(manifold, p, inner_radius, R).log_value

    def _log_integrand(self, t: float) -> float:
        return self.density.log_value(t) / (1.0 - self.p)

    def log_abs_derivative(self, t: float) -> float:
        """log |u'(t)| for a < t < R"""
        return self._log_integrand(t) - self.log_total

    def derivative(self, t: float) -> float:
        if t < self.inner_radius or t > self.R:
            return 0.0
        return -math.exp(self.log_abs_derivative(t))

    def __call__(self, t: float) -> float:
        if t <= self.inner_radius:
            return 1.0
        if t >= self.R:
            return 0.0
        tail = integrate_log(self._log_integrand, t, self.R, self.engine.quadrature)
        return min(1.0, math.exp(tail.log_value - self.log_total))

    def values(self, ts: Sequence[float]) -> np.ndarray:
        """u at many points, integrating each gap between sorted points once"""
        ts = np.asarray(ts, dtype=float)
        inside = np.unique(ts[(ts > self.inner_radius) & (ts < self.R)])
        log_tails = np.empty(inside.size)
        running = -math.inf
        upper = self.R
        for i in range(inside.size - 1, -1, -1):
            lower = float(inside[i])
            segment = integrate_log(self._log_integrand, lower, upper, self.engine.quadrature).log_value
            running = np.logaddexp(running, segment)
            log_tails[i] = running
            upper = lower
        lookup = dict(zip(inside.tolist(), np.minimum(1.0, np.exp(log_tails - self.log_total)).tolist()))
        result = np.empty(ts.size)
        for k, t in enumerate(ts.tolist()):
            if t <= self.inner_radius:
                result[k] = 1.0
            elif t >= self.R:
                result[k] = 0.0
            else:
                result[k] = lookup[t]
        return result


class CapacityEngine:
    """Service computing p-capacities of the core of a model manifold"""

    def __init__(self, quadrature: QuadratureSpec = QuadratureSpec(), limit_options: LimitOptions = LimitOptions()):
        self.quadrature = quadrature
        self.limit_options = limit_options

    def _interval(self, manifold: ModelManifold, R: float, inner_radius: Optional[float]) -> float:
        a = manifold.inner_radius if inner_radius is None else float(inner_radius)
        if not R > a:
            raise CapacityError(f"R must exceed the core radius {a}, got {R}")
        return a

    def log_flux_integral(self, manifold: ModelManifold, p: float, a: float, b: float) -> LogQuadratureResult:
        """log ∫_a^b S(t)^{1/(1-p)} dt"""
        density = FluxDensity(manifold)
        exponent = 1.0 / (1.0 - p)
        return integrate_log(lambda t: exponent * density.log_value(t), a, b, self.quadrature)

    def flux_capacity(
        self, manifold: ModelManifold, p: float, R: float, inner_radius: Optional[float] = None
    ) -> CapacityEstimate:
        """Cap_p(B_a ×_f L, B_R ×_f L) = [∫_a^R S^{1/(1-p)} dt]^{1-p}"""
        validate_p(p)
        a = self._interval(manifold, R, inner_radius)
        try:
            integral = self.log_flux_integral(manifold, p, a, R)
        except QuadratureError as e:
            logger.error(f"Flux quadrature failed for {manifold.label}, p={p}, R={R}: {e}")
            raise
        log_value = (1.0 - p) * integral.log_value
        value = _exp_or_fail(log_value, f"flux capacity at p={p}, R={R}")
        rel_err = max(integral.relative_error, self.quadrature.rel_tol)
        error_bound = value * ((1.0 - rel_err) ** (1.0 - p) - 1.0)
        logger.info(f"Flux capacity of {manifold.label} at p={p}, R={R}: {value:.12g} (±{error_bound:.2g})")
        return CapacityEstimate(
            value=value,
            error_bound=error_bound,
            method="flux",
            p=p,
            R=R,
            inner_radius=a,
            grid_size=None,
        )

    def discrete_energy(self, manifold: ModelManifold, p: float, nodes: Sequence[float], values: Sequence[float]) -> float:
        """Σ |Δu_i/Δt_i|^p S(t̄_i) Δt_i for nodal values u on increasing nodes"""
        validate_p(p)
        t = np.asarray(nodes, dtype=float)
        u = np.asarray(values, dtype=float)
        if t.size != u.size or t.size < 2:
            raise GridError(f"nodes and values must have equal length >= 2, got {t.size} and {u.size}")
        h = np.diff(t)
        if np.any(h <= 0.0):
            raise GridError("nodes must be strictly increasing")
        density = FluxDensity(manifold)
        mids = 0.5 * (t[:-1] + t[1:])
        log_s = np.array([density.log_value(float(x)) for x in mids])
        terms = np.exp(log_s + p * np.log(np.abs(np.diff(u)) / h + 1e-300) + np.log(h))
        return float(math.fsum(terms))

    def variational_minimizer(
        self,
        manifold: ModelManifold,
        p: float,
        R: float,
        grid_size: int = DEFAULT_GRID_SIZE,
        inner_radius: Optional[float] = None,
    ) -> VariationalSolution:
        """Minimize the discrete radial p-energy on a uniform grid of grid_size cells.

        For p < 2 the energy is stiff where the profile flattens, so the
        solve starts at p = 2 and walks the exponent 1/(p-1) up to its
        target, warm-starting each stage from the previous minimizer.
        """
        validate_p(p)
        a = self._interval(manifold, R, inner_radius)
        if grid_size < 2:
            raise GridError(f"grid_size must be >= 2, got {grid_size}")
        nodes = np.linspace(a, R, grid_size + 1)
        nodes[-1] = R
        h = np.diff(nodes)
        if np.any(h <= 0.0):
            raise GridError(f"grid of {grid_size} cells on [{a}, {R}] is degenerate")

        density = FluxDensity(manifold)
        mids = 0.5 * (nodes[:-1] + nodes[1:])
        log_s = np.array([density.log_value(float(x)) for x in mids])
        if np.min(log_s) - np.max(log_s) < math.log(_WEIGHT_FLOOR):
            raise GridError(
                f"flux density spans more than e^{-math.log(_WEIGHT_FLOOR):.0f} on [{a}, {R}]; "
                f"the discrete energy cannot be resolved (use the flux route)"
            )
        slope = 1.0 / (R - a)
        start = 1.0 - (nodes[1:-1] - a) * slope

        if p >= 2.0:
            result, log_scale = _minimize_energy(log_s, h, p, slope, start)
            iterations = result.iterations
        else:
            result, log_scale, iterations = _continue_from_quadratic(log_s, h, p, slope, start)
        value = result.value * math.exp(log_scale)

        coarse = self._coarse_discrete_minimum(density, p, a, R, max(1, grid_size // 2))
        ratio = grid_size / max(1, grid_size // 2)
        richardson = abs(coarse - value) / (ratio ** 2 - 1.0)
        error_bound = richardson + result.decrement * math.exp(log_scale) + 1e-14 * value

        logger.info(
            f"Variational capacity of {manifold.label} at p={p}, R={R}, grid={grid_size}: "
            f"{value:.12g} (±{error_bound:.2g}, {iterations} Newton iterations)"
        )
        estimate = CapacityEstimate(
            value=value,
            error_bound=error_bound,
            method="variational",
            p=p,
            R=R,
            inner_radius=a,
            grid_size=grid_size,
        )
        values = np.concatenate(([1.0], result.x, [0.0]))
        return VariationalSolution(estimate, nodes, values, iterations)

    def variational_capacity(
        self,
        manifold: ModelManifold,
        p: float,
        R: float,
        grid_size: int = DEFAULT_GRID_SIZE,
        inner_radius: Optional[float] = None,
    ) -> CapacityEstimate:
        return self.variational_minimizer(manifold, p, R, grid_size, inner_radius).estimate

    @staticmethod
    def _coarse_discrete_minimum(density: FluxDensity, p: float, a: float, R: float, cells: int) -> float:
        """Exact minimum of the discrete energy on a uniform grid: (Σ h S(t̄)^{1/(1-p)})^{1-p}"""
        nodes = np.linspace(a, R, cells + 1)
        h = np.diff(nodes)
        mids = 0.5 * (nodes[:-1] + nodes[1:])
        terms = np.array([density.log_value(float(x)) for x in mids]) / (1.0 - p) + np.log(h)
        log_sum = float(np.logaddexp.reduce(terms))
        return math.exp((1.0 - p) * log_sum)

    def optimal_profile(
        self, manifold: ModelManifold, p: float, R: float, inner_radius: Optional[float] = None
    ) -> OptimalProfile:
        validate_p(p)
        a = self._interval(manifold, R, inner_radius)
        return OptimalProfile(self, manifold, p, R, a)

    def capacity_limit(
        self, manifold: ModelManifold, p: float, R_schedule: Sequence[float] = DEFAULT_R_SCHEDULE
    ) -> LimitReport:
        """Trend of Cap_p(D, D_R) as R runs through an increasing schedule.

        The flux integral I(R) over the last three checkpoints is matched
        against a tail I(R) = I_∞ - C·R^{-γ}. Increments that shrink no
        faster than log R (γ → 0) mean I diverges and the capacity decays;
        otherwise γ is solved for and I_∞ extrapolated.
        """
        validate_p(p)
        schedule = [float(R) for R in R_schedule]
        if len(schedule) < 3:
            raise CapacityError(f"R_schedule needs at least 3 points, got {len(schedule)}")
        if any(b <= a for a, b in zip(schedule, schedule[1:])):
            raise CapacityError(f"R_schedule must be strictly increasing, got {schedule}")
        opts = self.limit_options
        notes: List[str] = []
        values: List[float] = []
        log_integrals: List[float] = []

        for R in schedule:
            estimate = self.flux_capacity(manifold, p, R)
            values.append(estimate["value"])
            log_integrals.append(math.log(estimate["value"]) / (1.0 - p) if estimate["value"] > 0.0 else math.inf)
            if estimate["value"] < opts.floor:
                notes.append(f"capacity {estimate['value']:.3g} fell below floor {opts.floor:g} at R={R:g}")
                return self._limit_report(0.0, "to-zero", schedule[: len(values)], values, None, notes)

        v1, v2, v3 = values[-3:]
        change = max(abs(v3 - v2), abs(v2 - v1)) / v3
        if change < opts.stabilization:
            notes.append(f"values stabilized (relative change {change:.3g} < {opts.stabilization:g})")
            return self._limit_report(v3, "to-positive", schedule, values, None, notes)

        # increments relative to the last integral, so huge integrals stay finite
        log_i3 = log_integrals[-1]
        i1, i2 = (math.exp(x - log_i3) for x in log_integrals[-3:-1])
        previous, last = i2 - i1, 1.0 - i2
        if previous <= 0.0 or last < 0.0:
            notes.append("flux integral did not increase between the last checkpoints")
            return self._limit_report(v3, "undetermined", schedule, values, None, notes)
        if last == 0.0:
            notes.append("flux integral stopped increasing")
            return self._limit_report(v3, "to-positive", schedule, values, 0.0, notes)

        ratio = last / previous
        r1, r2, r3 = schedule[-3:]
        logarithmic = math.log(r3 / r2) / math.log(r2 / r1)
        if ratio >= logarithmic * (1.0 - opts.divergence_band):
            notes.append(
                f"flux integral increments shrink no faster than log R "
                f"(ratio {ratio:.4g}, logarithmic ratio {logarithmic:.4g})"
            )
            return self._limit_report(0.0, "to-zero", schedule, values, ratio, notes)

        rate = _power_tail_rate(r1, r2, r3, ratio)
        if rate is None:
            notes.append(f"no power tail matches increment ratio {ratio:.4g}")
            return self._limit_report(v3, "undetermined", schedule, values, ratio, notes)
        spread = rate * math.log(r3 / r2)
        tail = last * math.exp(-spread) / -math.expm1(-spread)
        limit = math.exp((1.0 - p) * (log_i3 + math.log1p(tail)))
        notes.append(f"power-tail extrapolation with rate {rate:.4g} (increment ratio {ratio:.4g})")
        return self._limit_report(limit, "to-positive", schedule, values, ratio, notes)

    def _limit_report(
        self,
        limit: float,
        trend: str,
        schedule: List[float],
        values: List[float],
        ratio: Optional[float],
        notes: List[str],
    ) -> LimitReport:
        decay_slope = None
        tail = [(R, v) for R, v in zip(schedule, values) if v > 0.0][-3:]
        if len(tail) == 3:
            decay_slope = fit_line([math.log(math.log(R)) for R, _ in tail], [math.log(v) for _, v in tail]).slope
        logger.info(f"Capacity limit: trend {trend}, estimate {limit:.6g} over R in {schedule}")
        return LimitReport(
            limit_estimate=limit,
            trend=trend,
            schedule=schedule,
            values=values,
            increment_ratio=ratio,
            decay_slope=decay_slope,
            notes=notes,
        )


def _differences(interior: np.ndarray) -> np.ndarray:
    full = np.concatenate(([1.0], interior, [0.0]))
    return full[:-1] - full[1:]


def _minimize_energy(
    log_s: np.ndarray, h: np.ndarray, p: float, slope: float, start: np.ndarray
) -> Tuple[NewtonResult, float]:
    """Newton solve of Σ c_i |Δu_i|^p with c_i = S(t̄_i) h_i^{1-p}.

    Weights are scaled so the linear interpolant has energy 1; returns the
    result in scaled units and the log of the scale.
    """
    log_c = log_s + (1.0 - p) * np.log(h)
    log_c_max = float(np.max(log_c))
    weights = np.exp(log_c - log_c_max)
    linear_energy = float(np.sum(weights * (h * slope) ** p))
    weights = weights / linear_energy
    log_scale = log_c_max + math.log(linear_energy)

    def objective(interior: np.ndarray) -> float:
        return float(np.sum(weights * np.abs(_differences(interior)) ** p))

    def derivatives(interior: np.ndarray):
        d = _differences(interior)
        magnitude = np.maximum(np.abs(d), 1e-300)
        flux = p * weights * magnitude ** (p - 1.0) * np.sign(d)
        curvature = p * (p - 1.0) * weights * magnitude ** (p - 2.0)
        gradient = flux[1:] - flux[:-1]
        diag = curvature[1:] + curvature[:-1]
        upper = -curvature[1:-1]
        return gradient, diag, upper

    def step_bound(interior: np.ndarray, step: np.ndarray) -> float:
        # the minimizer is strictly decreasing; keep every Δu_i positive
        d = _differences(interior)
        dd = np.concatenate(([0.0], step, [0.0]))
        dd = dd[:-1] - dd[1:]
        shrinking = dd < 0.0
        if not np.any(shrinking):
            return math.inf
        return float(np.min(-d[shrinking] / dd[shrinking]))

    result = damped_newton(objective, derivatives, start, DEFAULT_GRAD_TOL, DEFAULT_MAX_ITER, step_bound)
    return result, log_scale


def _continue_from_quadratic(
    log_s: np.ndarray, h: np.ndarray, p: float, slope: float, start: np.ndarray
) -> Tuple[NewtonResult, float, int]:
    """Minimize at p < 2 by continuation in q = 1/(p-1) from q = 1"""
    target = 1.0 / (p - 1.0)
    result, log_scale = _minimize_energy(log_s, h, 2.0, slope, start)
    iterations = result.iterations
    q, step = 1.0, _CONTINUATION_STEP
    while q < target:
        stage_q = min(target, q + step)
        try:
            stage_p = p if stage_q >= target else 1.0 + 1.0 / stage_q
            result_next, log_scale_next = _minimize_energy(log_s, h, stage_p, slope, result.x)
        except ConvergenceError:
            step *= 0.5
            if step < _CONTINUATION_MIN_STEP:
                raise
            logger.debug(f"Continuation stage q={stage_q:.6g} failed; retrying with step {step:.3g}")
            continue
        result, log_scale, q = result_next, log_scale_next, stage_q
        iterations += result.iterations
    logger.debug(f"Continuation to p={p} finished after {iterations} Newton iterations")
    return result, log_scale, iterations


def _power_tail_rate(r1: float, r2: float, r3: float, ratio: float) -> Optional[float]:
    """γ > 0 with (r2^-γ - r3^-γ)/(r1^-γ - r2^-γ) = ratio.

    The left side falls from log(r3/r2)/log(r2/r1) at γ → 0 towards 0, so a
    root exists for every ratio below the logarithmic one.
    """
    near, far = math.log(r2 / r1), math.log(r3 / r2)

    def mismatch(rate: float) -> float:
        log_ratio = -rate * near + math.log(-math.expm1(-rate * far)) - math.log(-math.expm1(-rate * near))
        return log_ratio - math.log(ratio)

    low = high = 1.0 / near
    for _ in range(_BRACKET_STEPS):
        if mismatch(high) < 0.0:
            break
        high *= 2.0
    else:
        return None
    for _ in range(_BRACKET_STEPS):
        if mismatch(low) > 0.0:
            break
        low *= 0.5
    else:
        return None
    return brentq(mismatch, low, high, xtol=1e-14, rtol=1e-12)


def _exp_or_fail(x: float, what: str) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        raise CapacityError(f"{what} overflows (log value {x})")
