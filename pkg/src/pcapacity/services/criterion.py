"""
Parabolicity service: divergence test of ∫_{r0}^∞ g(t) dt with
g(t) = (f(t)^ℓ·ω_{n-1}σ(t)^{n-1})^{1/(1-p)}.

The manifold is p-parabolic exactly when the integral diverges. The integral
is accumulated over doubling panels up to T_max; the decision is read from
the size of the partial integral, the shape of the integrand tail (power vs
exponential fit) and whether the tail-extrapolated totals have settled.
"""

import math
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import CriterionError, ProfileOverflowError
from ..models.geometry import FluxDensity, ModelManifold
from ..models.types import CrossCheck, SweepRow, SweepTable, Verdict
from ..numerics import QuadratureSpec, fit_line, integrate_log
from .capacity import DEFAULT_R_SCHEDULE, CapacityEngine

logger = logging.getLogger(__name__)

DEFAULT_T_MAX = 1e6
DEFAULT_MARGIN = 0.05
DEFAULT_DIVERGENCE_THRESHOLD = 1e100
DEFAULT_CAUCHY_TOL = 1e-8
DEFAULT_TAIL_SAMPLES = 33
DEFAULT_TIE_TOL = 1e-6

POWER = "power"
EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class ClassifyOptions:
    T_max: float = DEFAULT_T_MAX
    tail_window: Optional[Tuple[float, float]] = None  # default [√T, T]
    margin: float = DEFAULT_MARGIN
    divergence_threshold: float = DEFAULT_DIVERGENCE_THRESHOLD
    cauchy_tol: float = DEFAULT_CAUCHY_TOL
    tail_samples: int = DEFAULT_TAIL_SAMPLES
    tie_tol: float = DEFAULT_TIE_TOL

    def __post_init__(self):
        if not self.T_max > 1.0:
            raise ValueError(f"T_max must exceed 1, got {self.T_max}")
        if not self.margin > 0.0:
            raise ValueError(f"margin must be positive, got {self.margin}")
        if not self.divergence_threshold > 1.0:
            raise ValueError(f"divergence_threshold must exceed 1, got {self.divergence_threshold}")
        if self.tail_samples < 3:
            raise ValueError(f"tail_samples must be >= 3, got {self.tail_samples}")
        if self.tail_window is not None and not 0.0 < self.tail_window[0] < self.tail_window[1]:
            raise ValueError(f"tail_window must be an increasing pair, got {self.tail_window}")


@dataclass
class _TailFit:
    kind: Optional[str]
    exponent: Optional[float] = None
    exponent_ci: Optional[Tuple[float, float]] = None
    r2_power: Optional[float] = None
    rate: Optional[float] = None
    r2_exponential: Optional[float] = None


def _validate_p(p: float) -> None:
    if not p > 1.0:
        raise CriterionError(f"p must exceed 1, got {p}")


def _relative_change(log_new: float, log_old: float) -> float:
    return abs(math.expm1(log_new - log_old))


class ParabolicityService:
    """Service deciding p-parabolicity of model manifolds"""

    def __init__(
        self,
        quadrature: QuadratureSpec = QuadratureSpec(),
        options: ClassifyOptions = ClassifyOptions(),
        capacity: Optional[CapacityEngine] = None,
    ):
        self.quadrature = quadrature
        self.options = options
        self.capacity = capacity or CapacityEngine(quadrature)

    def log_criterion_integrand(self, manifold: ModelManifold, p: float, t: float) -> float:
        _validate_p(p)
        return FluxDensity(manifold).log_inner(t) / (1.0 - p)

    def criterion_integrand(self, manifold: ModelManifold, p: float, t: float) -> float:
        """g(t) = criterion_inner(m, t)^{1/(1-p)}"""
        log_g = self.log_criterion_integrand(manifold, p, t)
        try:
            return math.exp(log_g)
        except OverflowError:
            raise ProfileOverflowError(f"criterion integrand overflows at t={t} (log value {log_g})")

    def log_samples(
        self, manifold: ModelManifold, p: float, T_max: Optional[float] = None, count: int = 200
    ) -> List[Tuple[float, float]]:
        """(t, log g(t)) on a geometric grid over [r0, T_max]; overflowing points are dropped"""
        _validate_p(p)
        T_max = self.options.T_max if T_max is None else T_max
        density = FluxDensity(manifold)
        samples = []
        for t in np.geomspace(manifold.inner_radius, T_max, count).tolist():
            try:
                samples.append((t, density.log_inner(t) / (1.0 - p)))
            except ProfileOverflowError:
                logger.debug(f"Dropping log sample at t={t}: overflow")
        return samples

    def classify(self, manifold: ModelManifold, p: float, options: Optional[ClassifyOptions] = None) -> Verdict:
        """Decide whether ∫ g diverges (Parabolic) or converges (Hyperbolic)"""
        _validate_p(p)
        opts = options or self.options
        density = FluxDensity(manifold)
        exponent = 1.0 / (1.0 - p)

        def log_g(t: float) -> float:
            return exponent * density.log_inner(t)

        a = manifold.inner_radius
        if not opts.T_max > a:
            raise CriterionError(f"T_max {opts.T_max} must exceed the core radius {a}")
        log_threshold = math.log(opts.divergence_threshold)
        notes: List[str] = []
        checkpoints: List[Tuple[float, float]] = []
        log_g_at: List[float] = []
        log_total = -math.inf
        lo = a

        logger.info(f"Classifying {manifold.label} at p={p} up to T={opts.T_max:g}")
        while lo < opts.T_max:
            hi = min(2.0 * lo, opts.T_max)
            try:
                panel = integrate_log(log_g, lo, hi, self.quadrature)
                log_g_hi = log_g(hi)
            except ProfileOverflowError as e:
                if log_g_at and (len(log_g_at) < 2 or log_g_at[-1] >= log_g_at[-2]):
                    notes.append(f"integrand overflowed on [{lo:g}, {hi:g}] while growing: {e}")
                    return self._verdict("Parabolic", p, lo, log_total, None, False, checkpoints, notes)
                notes.append(f"integrand evaluation overflowed beyond T={lo:g}; tail analysis stops there")
                break
            log_total = float(np.logaddexp(log_total, panel.log_value))
            checkpoints.append((hi, log_total))
            log_g_at.append(log_g_hi)
            if log_total > log_threshold:
                notes.append(
                    f"partial integral exceeds {opts.divergence_threshold:g} at T={hi:g} (log value {log_total:.6g})"
                )
                logger.info(f"{manifold.label} is {p}-parabolic: divergence certified at T={hi:g}")
                return self._verdict("Parabolic", p, hi, log_total, None, False, checkpoints, notes)
            lo = hi

        if len(checkpoints) < 3:
            notes.append(f"only {len(checkpoints)} checkpoints before T={lo:g}; too few for a tail analysis")
            return self._verdict("Inconclusive", p, lo, log_total, None, False, checkpoints, notes)
        t_end = checkpoints[-1][0]

        window = opts.tail_window or (math.sqrt(t_end), t_end)
        w_lo, w_hi = max(window[0], a), min(window[1], t_end)
        if not w_hi > w_lo:
            raise CriterionError(f"tail window {window} does not meet [{a}, {t_end}]")
        fit = self._fit_tail(log_g, w_lo, w_hi, opts)
        if fit.kind is None:
            notes.append(
                f"power and exponential fits tie (R² {fit.r2_power:.9f} vs {fit.r2_exponential:.9f}); "
                f"tail shape ambiguous"
            )
            return self._verdict("Inconclusive", p, t_end, log_total, fit, False, checkpoints, notes)

        converged = self._cauchy(fit.kind, checkpoints, log_g_at, a, opts, notes)
        decision, refit = self._decide(fit, converged, log_g, w_lo, w_hi, opts, notes)
        logger.info(f"{manifold.label} at p={p}: {decision} ({fit.kind} tail, Cauchy {converged})")
        return self._verdict(decision, p, t_end, log_total, fit, converged, checkpoints, notes, refit)

    def _fit_tail(self, log_g, lo: float, hi: float, opts: ClassifyOptions) -> _TailFit:
        ts = np.geomspace(lo, hi, opts.tail_samples)
        values = np.array([log_g(float(t)) for t in ts])
        power = fit_line(np.log(ts), values)
        if power.flat:
            return _TailFit(POWER, 0.0, (0.0, 0.0), 1.0, 0.0, 1.0)
        exponential = fit_line(ts, values)
        if exponential.r2 > power.r2 + opts.tie_tol:
            kind = EXPONENTIAL
        elif power.r2 > exponential.r2 + opts.tie_tol:
            kind = POWER
        else:
            kind = None
        return _TailFit(kind, power.slope, power.slope_ci, power.r2, exponential.slope, exponential.r2)

    def _cauchy(
        self,
        kind: str,
        checkpoints: List[Tuple[float, float]],
        log_g_at: List[float],
        a: float,
        opts: ClassifyOptions,
        notes: List[str],
    ) -> bool:
        """Tail-extrapolated totals settle to within cauchy_tol over the last two doublings"""
        extrapolated = []
        starts = [a] + [T for T, _ in checkpoints[:-1]]
        for k in range(1, len(checkpoints)):
            T, log_total = checkpoints[k]
            T_prev = starts[k]
            rise = log_g_at[k] - log_g_at[k - 1]
            if kind == POWER:
                alpha = rise / math.log(T / T_prev)
                if not alpha < -1.0:
                    extrapolated.append(math.inf)
                    continue
                log_tail = log_g_at[k] + math.log(T) - math.log(-alpha - 1.0)
            else:
                kappa = rise / (T - T_prev)
                if not kappa < 0.0:
                    extrapolated.append(math.inf)
                    continue
                log_tail = log_g_at[k] - math.log(-kappa)
            extrapolated.append(float(np.logaddexp(log_total, log_tail)))

        raw = _relative_change(checkpoints[-1][1], checkpoints[-2][1])
        notes.append(
            f"raw partial integrals {'met' if raw < opts.cauchy_tol else 'missed'} the {opts.cauchy_tol:g} "
            f"Cauchy test over the last doubling (change {raw:.3g})"
        )
        if len(extrapolated) < 3 or not all(math.isfinite(x) for x in extrapolated[-3:]):
            return False
        x1, x2, x3 = extrapolated[-3:]
        change = max(_relative_change(x3, x2), _relative_change(x2, x1))
        notes.append(f"tail-extrapolated totals changed by {change:.3g} over the last two doublings")
        return change < opts.cauchy_tol

    def _decide(self, fit: _TailFit, converged: bool, log_g, lo: float, hi: float, opts, notes):
        if fit.kind == EXPONENTIAL:
            if fit.rate > 0.0:
                notes.append(f"integrand grows exponentially (rate {fit.rate:.6g})")
                return "Parabolic", None
            notes.append(f"integrand decays exponentially (rate {fit.rate:.6g})")
            return ("Hyperbolic" if converged else "Inconclusive"), None

        alpha = fit.exponent
        if alpha >= -1.0 + opts.margin:
            notes.append(f"tail exponent {alpha:.6g} >= -1 + {opts.margin:g}")
            return "Parabolic", None
        if alpha < -1.0 - opts.margin:
            notes.append(f"tail exponent {alpha:.6g} < -1 - {opts.margin:g}")
            if not converged:
                notes.append("tail-extrapolated totals did not settle")
            return ("Hyperbolic" if converged else "Inconclusive"), None

        # |alpha + 1| <= margin: g ~ t^{-1}(log t)^beta diverges iff beta >= -1
        ts = np.geomspace(max(lo, math.e), hi, opts.tail_samples)
        log_t = np.log(ts)
        values = np.array([log_g(float(t)) for t in ts]) + log_t
        beta = fit_line(np.log(log_t), values).slope
        notes.append(f"borderline tail exponent {alpha:.6g}; log refit exponent {beta:.6g}")
        if beta >= -1.0:
            return "Parabolic", beta
        if beta < -1.0 - opts.margin and converged:
            return "Hyperbolic", beta
        return "Inconclusive", beta

    @staticmethod
    def _verdict(
        decision: str,
        p: float,
        t_reached: float,
        log_total: float,
        fit: Optional[_TailFit],
        converged: bool,
        checkpoints: List[Tuple[float, float]],
        notes: List[str],
        refit: Optional[float] = None,
    ) -> Verdict:
        try:
            partial = math.exp(log_total)
        except OverflowError:
            partial = math.inf
        fit = fit or _TailFit(None)
        return Verdict(
            decision=decision,
            p=p,
            t_reached=t_reached,
            partial_integral=partial,
            log_partial_integral=log_total,
            tail_exponent=fit.exponent,
            tail_exponent_ci=fit.exponent_ci,
            r2_power=fit.r2_power,
            exponential_rate=fit.rate,
            r2_exponential=fit.r2_exponential,
            log_refit_exponent=refit,
            cauchy_converged=converged,
            checkpoints=checkpoints,
            evidence_notes=notes,
        )

    def sweep_p(
        self, manifold: ModelManifold, p_grid: Sequence[float], options: Optional[ClassifyOptions] = None
    ) -> SweepTable:
        """Classify along an increasing p grid and locate the parabolic threshold"""
        grid = [float(p) for p in p_grid]
        if not grid:
            raise CriterionError("p grid is empty")
        for p in grid:
            _validate_p(p)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise CriterionError(f"p grid must be strictly increasing, got {grid}")

        rows = [SweepRow(p=p, verdict=self.classify(manifold, p, options)) for p in grid]
        decisions = [row["verdict"]["decision"] for row in rows]
        notes: List[str] = []
        critical = None
        if "Inconclusive" in decisions:
            notes.append("critical p not estimated: some verdicts are Inconclusive")
        elif all(d == decisions[0] for d in decisions):
            notes.append(f"no transition on the grid: {decisions[0]} throughout")
        else:
            first_parabolic = decisions.index("Parabolic")
            if any(d == "Hyperbolic" for d in decisions[first_parabolic:]) or first_parabolic == 0:
                notes.append("verdicts are not monotone in p")
            else:
                critical = 0.5 * (grid[first_parabolic - 1] + grid[first_parabolic])
        logger.info(f"Sweep of {manifold.label} over {len(grid)} values of p: critical p {critical}")
        return SweepTable(rows=rows, critical_p_estimate=critical, notes=notes)

    def cross_check(
        self,
        manifold: ModelManifold,
        p: float,
        R_schedule: Sequence[float] = DEFAULT_R_SCHEDULE,
        options: Optional[ClassifyOptions] = None,
    ) -> CrossCheck:
        """Criterion verdict against the trend of Cap_p(D, D_R) as R grows"""
        verdict = self.classify(manifold, p, options)
        limit = self.capacity.capacity_limit(manifold, p, R_schedule)
        trend = limit["trend"]
        decision = verdict["decision"]
        if decision == "Inconclusive":
            agrees = None
        else:
            # an undetermined trend matches neither verdict
            agrees = (decision == "Parabolic" and trend == "to-zero") or (
                decision == "Hyperbolic" and trend == "to-positive"
            )
        if agrees is False:
            logger.warning(
                f"Criterion and capacity disagree for {manifold.label} at p={p}: "
                f"{decision} vs capacity {trend}"
            )
        return CrossCheck(agrees=agrees, criterion=verdict, capacity_trend=trend, limit=limit)
