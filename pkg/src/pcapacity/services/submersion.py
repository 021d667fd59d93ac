"""
Submersion service: transfer of p-parabolicity from a model base N to the
total space M of a submersion whose fibers have uniformly bounded volume.

Fibers are described radially, Vol(F_x) = V(t) for x on ∂B_t. Radial
cutoffs u_j on the base (1 on B_j, 0 outside B_{R(j)}) pull back to M with
energy

    E_j = ∫_j^{R(j)} |u_j'(t)|^p · V(t) · ω_{n-1}σ(t)^{n-1} dt,

which is at most sup V times the base energy of u_j. A parabolic base has
cutoffs with base energy → 0, so E_j → 0 as well.
"""

import math
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from ..errors import CapacityError, PreconditionError, ProfileOverflowError
from ..models.geometry import FluxDensity, SubmersionSpec, base_manifold
from ..models.types import BoundCheck, ConvergenceReport, DecayReport, Verdict
from ..numerics import QuadratureSpec, fit_line, integrate_log
from .capacity import CapacityEngine, validate_p
from .criterion import ParabolicityService

logger = logging.getLogger(__name__)

DEFAULT_BOUND_HORIZON = 1e6
BOUND_SLOPE_TOL = 1e-3
BOUND_GRID = 65
BOUND_REFINEMENTS = 6
DECAY_FRACTION = 1e-6
FAMILIES = ("optimal", "log")


@dataclass(frozen=True)
class CutoffFamily:
    """Radial cutoffs u_j: 1 on B_j, 0 outside B_{j^k}, optimal or logarithmic in between"""

    kind: str = "optimal"
    exponent: float = 2.0

    def __post_init__(self):
        if self.kind not in FAMILIES:
            raise ValueError(f"Unknown cutoff family '{self.kind}', expected one of {FAMILIES}")
        if not self.exponent > 1.0:
            raise ValueError(f"cutoff exponent must exceed 1, got {self.exponent}")

    def outer_radius(self, j: float) -> float:
        return float(j) ** self.exponent


class SubmersionService:
    """Service checking the fiber bound and the cutoff energy decay"""

    def __init__(
        self,
        quadrature: QuadratureSpec = QuadratureSpec(),
        capacity: Optional[CapacityEngine] = None,
        criterion: Optional[ParabolicityService] = None,
    ):
        self.quadrature = quadrature
        self.capacity = capacity or CapacityEngine(quadrature)
        self.criterion = criterion or ParabolicityService(quadrature, capacity=self.capacity)

    def _log_fiber_volume(self, spec: SubmersionSpec, t: float) -> float:
        return spec.fiber_volume_fn.log_evaluate(t)

    def check_uniform_bound(self, spec: SubmersionSpec, T: float = DEFAULT_BOUND_HORIZON) -> BoundCheck:
        """Estimate sup V on [r0, T] and decide from the tail growth whether V is bounded"""
        a = spec.inner_radius
        if not T > a:
            raise ValueError(f"T must exceed the core radius {a}, got {T}")
        notes: List[str] = []
        try:
            log_sup, argmax = self._log_sup(spec, a, T)
            ts = np.geomspace(max(math.sqrt(T), a), T, 33)
            tail = fit_line(np.log(ts), [self._log_fiber_volume(spec, float(t)) for t in ts])
        except ProfileOverflowError as e:
            notes.append(f"fiber volume overflows: {e}")
            return BoundCheck(bounded=False, sup_estimate=math.inf, argmax_t=math.nan, tail_exponent=None, notes=notes)

        sup = math.exp(log_sup) if log_sup < 709.0 else math.inf
        bounded = tail.slope <= BOUND_SLOPE_TOL and math.isfinite(sup)
        notes.append(f"tail exponent of V on [{ts[0]:g}, {T:g}] is {tail.slope:.6g}")
        if not bounded:
            notes.append(f"fiber volume grows (tail exponent above {BOUND_SLOPE_TOL:g})")
        if spec.claimed_bound is not None and sup > spec.claimed_bound * (1.0 + 1e-12):
            bounded = False
            notes.append(f"sup estimate {sup:.12g} exceeds the claimed bound {spec.claimed_bound:g}")
        logger.info(f"Fiber bound for {spec.name or spec.fiber_volume_fn.to_text()}: bounded={bounded}, sup≈{sup:.6g}")
        return BoundCheck(bounded=bounded, sup_estimate=sup, argmax_t=argmax, tail_exponent=tail.slope, notes=notes)

    def _log_sup(self, spec: SubmersionSpec, a: float, T: float):
        """max of log V on a geometric grid, refined around the current argmax"""
        grid = np.geomspace(a, T, BOUND_GRID)
        grid[0], grid[-1] = a, T
        best_t, best = a, -math.inf
        for _ in range(BOUND_REFINEMENTS + 1):
            values = [self._log_fiber_volume(spec, float(t)) for t in grid]
            k = int(np.argmax(values))
            if values[k] > best:
                best, best_t = values[k], float(grid[k])
            lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
            grid = np.linspace(lo, hi, 17)
        return best, best_t

    def transfer_verdict(
        self, spec: SubmersionSpec, base_verdict: Verdict, p: float, bound: Optional[BoundCheck] = None
    ) -> Verdict:
        """Parabolic when the fibers are bounded and the base is parabolic, otherwise Inconclusive"""
        if base_verdict["p"] != p:
            raise PreconditionError(f"base verdict was computed at p={base_verdict['p']}, not p={p}")
        bound = bound or self.check_uniform_bound(spec)
        notes = list(base_verdict["evidence_notes"]) + list(bound["notes"])
        if bound["bounded"] and base_verdict["decision"] == "Parabolic":
            decision = "Parabolic"
            notes.append("bounded-fiber transfer from parabolic base")
        else:
            decision = "Inconclusive"
            if not bound["bounded"]:
                notes.append("fiber volume not uniformly bounded; transfer does not apply")
            else:
                notes.append(f"base is {base_verdict['decision']}; transfer only runs from a parabolic base")
        verdict = dict(base_verdict)
        verdict.update(decision=decision, evidence_notes=notes)
        return Verdict(**verdict)

    def _cutoff_interval(self, spec: SubmersionSpec, family: CutoffFamily, j: float):
        if not j > 1 or j < spec.inner_radius:
            raise CapacityError(f"j must exceed 1 and be at least the core radius {spec.inner_radius}, got {j}")
        return float(j), family.outer_radius(j)

    def _energy(self, spec: SubmersionSpec, family: CutoffFamily, p: float, j: float, with_fibers: bool) -> float:
        validate_p(p)
        lo, hi = self._cutoff_interval(spec, family, j)
        density = FluxDensity(base_manifold(spec))

        def log_v(t: float) -> float:
            return self._log_fiber_volume(spec, t) if with_fibers else 0.0

        if family.kind == "optimal":
            exponent = 1.0 / (1.0 - p)
            log_j = self.capacity.log_flux_integral(base_manifold(spec), p, lo, hi).log_value
            weighted = integrate_log(lambda t: log_v(t) + exponent * density.log_value(t), lo, hi, self.quadrature)
            log_energy = weighted.log_value - p * log_j
        else:
            spread = math.log(hi / lo)
            weighted = integrate_log(
                lambda t: log_v(t) - p * math.log(t) + density.log_value(t), lo, hi, self.quadrature
            )
            log_energy = weighted.log_value - p * math.log(spread)
        return math.exp(log_energy)

    def pulled_back_energy(self, spec: SubmersionSpec, family: CutoffFamily, p: float, j: float) -> float:
        """E_j = ∫ |u_j'|^p V ω σ^{n-1} dt"""
        energy = self._energy(spec, family, p, j, with_fibers=True)
        logger.debug(f"Pulled-back energy at j={j}, p={p} ({family.kind} cutoff): {energy:.12g}")
        return energy

    def base_energy(self, spec: SubmersionSpec, family: CutoffFamily, p: float, j: float) -> float:
        """Energy of u_j on the base alone (V ≡ 1)"""
        return self._energy(spec, family, p, j, with_fibers=False)

    def verify_decay(
        self,
        spec: SubmersionSpec,
        p: float,
        j_schedule: Sequence[int],
        family: CutoffFamily = CutoffFamily(),
        base_verdict: Optional[Verdict] = None,
        bound: Optional[BoundCheck] = None,
    ) -> DecayReport:
        """E_j along the schedule; refuses unless the base is parabolic and the fibers bounded"""
        validate_p(p)
        schedule = [int(j) for j in j_schedule]
        if len(schedule) < 2:
            raise CapacityError(f"j schedule needs at least 2 entries, got {len(schedule)}")
        if any(b <= a for a, b in zip(schedule, schedule[1:])):
            raise CapacityError(f"j schedule must be strictly increasing, got {schedule}")

        base_verdict = base_verdict or self.criterion.classify(base_manifold(spec), p)
        if base_verdict["decision"] != "Parabolic":
            raise PreconditionError(f"base is {base_verdict['decision']} at p={p}, not Parabolic")
        bound = bound or self.check_uniform_bound(spec)
        if not bound["bounded"]:
            raise PreconditionError(f"fiber volume is not uniformly bounded: {'; '.join(bound['notes'])}")

        energies = [self.pulled_back_energy(spec, family, p, j) for j in schedule]
        notes: List[str] = []
        tail = schedule[-3:] if len(schedule) >= 3 else schedule
        tail_energies = energies[-len(tail):]
        decreasing = all(b < a for a, b in zip(tail_energies, tail_energies[1:]))
        decays = False
        if not decreasing:
            notes.append("energies are not eventually decreasing")
        elif energies[-1] < DECAY_FRACTION * energies[0]:
            decays = True
            notes.append(f"last energy below {DECAY_FRACTION:g} of the first")
        elif len(schedule) >= 3 and all(e > 0.0 for e in energies):
            log_e = np.log(energies)
            log_j = np.log(schedule)
            slow = fit_line(np.log(log_j), log_e).slope
            fast = fit_line(log_j, log_e).slope
            notes.append(f"decay exponents: {slow:.6g} in log j, {fast:.6g} in j")
            decays = slow < 0.0 or fast < 0.0
        else:
            decays = True
            notes.append("energies decrease along a two-point schedule")
        logger.info(f"Energy decay along j={schedule} at p={p}: decays={decays}")
        return DecayReport(decays=decays, j_schedule=schedule, energies=energies, notes=notes)

    def verify_uniform_convergence(
        self,
        spec: SubmersionSpec,
        p: float,
        j_schedule: Sequence[int],
        compact_radius: float,
        family: CutoffFamily = CutoffFamily(),
    ) -> ConvergenceReport:
        """sup over [r0, K] of |1 - u_j| along the schedule"""
        validate_p(p)
        K = float(compact_radius)
        if not K > spec.inner_radius:
            raise ValueError(f"compact_radius must exceed the core radius {spec.inner_radius}, got {K}")
        base = base_manifold(spec)
        deviations = []
        for j in j_schedule:
            lo, hi = self._cutoff_interval(spec, family, j)
            if K <= lo:
                deviations.append(0.0)
            elif K >= hi:
                deviations.append(1.0)
            elif family.kind == "optimal":
                u = self.capacity.optimal_profile(base, p, hi, inner_radius=lo)(K)
                deviations.append(1.0 - u)
            else:
                deviations.append(1.0 - math.log(hi / K) / math.log(hi / lo))
        converges = all(b <= a for a, b in zip(deviations, deviations[1:])) and deviations[-1] == 0.0
        return ConvergenceReport(
            converges=converges,
            compact_radius=K,
            j_schedule=[int(j) for j in j_schedule],
            deviations=deviations,
        )
