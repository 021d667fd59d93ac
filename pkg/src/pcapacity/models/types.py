"""
Type definitions for p-capacity results.

This module contains TypedDict definitions for the records produced by the
services and serialized by the CLI.
"""

from typing import List, Optional, Tuple

try:
    from typing_extensions import Literal, TypedDict
except ImportError:
    from typing import Literal, TypedDict


Method = Literal["flux", "variational"]
Decision = Literal["Parabolic", "Hyperbolic", "Inconclusive"]
Trend = Literal["to-zero", "to-positive", "undetermined"]


class CapacityEstimate(TypedDict):
    """Cap_p(D, D_R) with its error bound"""
    value: float
    error_bound: float
    method: Method
    p: float
    R: float
    inner_radius: float
    grid_size: Optional[int]  # variational only


class LimitReport(TypedDict):
    """Exhaustion limit R → ∞ of Cap_p(D, D_R)"""
    limit_estimate: float
    trend: Trend
    schedule: List[float]
    values: List[float]
    increment_ratio: Optional[float]  # ratio of the last two increments of the flux integral
    decay_slope: Optional[float]  # slope of log Cap vs log log R over the last three points
    notes: List[str]


class Verdict(TypedDict):
    """Outcome of the divergence test of the parabolicity integral"""
    decision: Decision
    p: float
    t_reached: float  # T_max, or the checkpoint where divergence was certified
    partial_integral: float
    log_partial_integral: float
    tail_exponent: Optional[float]
    tail_exponent_ci: Optional[Tuple[float, float]]
    r2_power: Optional[float]
    exponential_rate: Optional[float]
    r2_exponential: Optional[float]
    log_refit_exponent: Optional[float]
    cauchy_converged: bool
    checkpoints: List[Tuple[float, float]]  # (T, log of the partial integral up to T)
    evidence_notes: List[str]


class SweepRow(TypedDict):
    p: float
    verdict: Verdict


class SweepTable(TypedDict):
    rows: List[SweepRow]
    critical_p_estimate: Optional[float]
    notes: List[str]


class CrossCheck(TypedDict):
    """Criterion verdict against the capacity trend; agrees is None when either is undecided"""
    agrees: Optional[bool]
    criterion: Verdict
    capacity_trend: Trend
    limit: LimitReport


class BoundCheck(TypedDict):
    """Uniform fiber-volume bound on [r0, T]"""
    bounded: bool
    sup_estimate: float
    argmax_t: float
    tail_exponent: Optional[float]
    notes: List[str]


class DecayReport(TypedDict):
    """Energies of the pulled-back cutoff sequence"""
    decays: bool
    j_schedule: List[int]
    energies: List[float]
    notes: List[str]


class ConvergenceReport(TypedDict):
    """sup over B_K of |1 - u_j| along the schedule"""
    converges: bool
    compact_radius: float
    j_schedule: List[int]
    deviations: List[float]


class ResultRecord(TypedDict, total=False):
    """Flat record written by the CLI, one JSON object or one CSV row"""
    operation: str
    spec: str
    kind: str
    p: float
    R: float
    method: str
    grid_size: int
    value: float
    error_bound: float
    relative_gap: float
    decision: str
    partial_integral: float
    tail_exponent: float
    tail_exponent_low: float
    tail_exponent_high: float
    t_reached: float
    critical_p: float
    j: int
    energy: float
    decays: bool
    notes: str
    wall_time: float
