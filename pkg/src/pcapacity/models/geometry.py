"""
Model warped products M = N ×_f L over a rotationally symmetric base.

The base N^n carries the metric dt² + σ(t)² ds²_{S^{n-1}}, so the geodesic
sphere ∂B_t has area ω_{n-1}·σ(t)^{n-1}. The fiber L^ℓ only enters through
its dimension and total volume, and the warp f is radial. Everything
downstream is computed from the boundary measure of D_t = B_t ×_f L,

    S(t) = vol(L) · f(t)^ℓ · ω_{n-1} · σ(t)^{n-1}.
"""

import math
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Optional

import numpy as np
from scipy.special import gammaln

from ..errors import ManifoldError, ProfileDomainError, ProfileOverflowError
from ..profiles import BinOp, Const, ProfileExpr, parse

logger = logging.getLogger(__name__)

DEFAULT_INNER_RADIUS = 1.0

# Spot-check grid for positivity of profiles: geometric on [r0, 10^3 r0].
VALIDATION_SAMPLES = 25
VALIDATION_SPAN = 1e3


def log_sphere_area(k: int) -> float:
    """log of the area of the unit k-sphere, ω_k = 2π^{(k+1)/2} / Γ((k+1)/2); ω_0 = 2"""
    if k < 0:
        raise ValueError(f"sphere dimension must be non-negative, got {k}")
    half = 0.5 * (k + 1)
    return math.log(2.0) + half * math.log(math.pi) - float(gammaln(half))


def sphere_area(k: int) -> float:
    return math.exp(log_sphere_area(k))


def _as_expr(value) -> ProfileExpr:
    if isinstance(value, ProfileExpr):
        return value
    if isinstance(value, (int, float)):
        return Const(float(value))
    return parse(str(value))


def _check_positive(expr: ProfileExpr, label: str, inner_radius: float) -> None:
    """Spot-check expr > 0 on a geometric grid starting at inner_radius"""
    grid = np.geomspace(inner_radius, inner_radius * VALIDATION_SPAN, VALIDATION_SAMPLES)
    for t in grid:
        try:
            expr.log_evaluate(float(t))
        except ProfileOverflowError:
            logger.debug(f"Skipping positivity check of {label} at t={t}: overflow")
        except ProfileDomainError as e:
            raise ManifoldError(f"{label} = {expr.to_text()} must be positive for t >= {inner_radius}: {e}")


@dataclass(frozen=True)
class ModelManifold:
    """Warped product N ×_f L with rotationally symmetric base N^n"""

    base_dim: int
    base_profile: ProfileExpr
    warp: ProfileExpr
    fiber_dim: int
    fiber_volume: float = 1.0
    inner_radius: float = DEFAULT_INNER_RADIUS
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        if self.base_dim < 1:
            raise ManifoldError(f"base_dim must be >= 1, got {self.base_dim}")
        if self.fiber_dim < 0:
            raise ManifoldError(f"fiber_dim must be >= 0, got {self.fiber_dim}")
        if not (self.fiber_volume > 0.0 and math.isfinite(self.fiber_volume)):
            raise ManifoldError(f"fiber_volume must be positive and finite, got {self.fiber_volume}")
        if not (self.inner_radius > 0.0 and math.isfinite(self.inner_radius)):
            raise ManifoldError(f"inner_radius must be positive, got {self.inner_radius}")
        if self.fiber_dim == 0 and self.fiber_volume != 1.0:
            logger.warning(
                f"fiber_dim is 0 (trivial fiber): ignoring fiber_volume={self.fiber_volume}"
            )
            object.__setattr__(self, "fiber_volume", 1.0)
        _check_positive(self.base_profile, "sigma", self.inner_radius)
        if self.fiber_dim > 0:
            _check_positive(self.warp, "warp", self.inner_radius)

    @classmethod
    def from_text(
        cls,
        base_dim: int,
        sigma: str,
        warp: str = "1",
        fiber_dim: int = 0,
        fiber_volume: float = 1.0,
        inner_radius: float = DEFAULT_INNER_RADIUS,
        name: Optional[str] = None,
    ) -> "ModelManifold":
        return cls(
            base_dim=base_dim,
            base_profile=_as_expr(sigma),
            warp=_as_expr(warp),
            fiber_dim=fiber_dim,
            fiber_volume=fiber_volume,
            inner_radius=inner_radius,
            name=name,
        )

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        return (
            f"n={self.base_dim}, sigma={self.base_profile.to_text()}, "
            f"f={self.warp.to_text()}, l={self.fiber_dim}"
        )

    def scaled(self, warp_factor: float = 1.0, sigma_factor: float = 1.0, volume_factor: float = 1.0) -> "ModelManifold":
        """Copy with f → c_f·f, σ → c_σ·σ, vol(L) → c_v·vol(L)"""
        warp = self.warp if warp_factor == 1.0 else BinOp("*", Const(warp_factor), self.warp)
        sigma = self.base_profile if sigma_factor == 1.0 else BinOp("*", Const(sigma_factor), self.base_profile)
        return replace(self, warp=warp, base_profile=sigma, fiber_volume=self.fiber_volume * volume_factor)


class FluxDensity:
    """S(t) = vol(L)·f(t)^ℓ·ω_{n-1}σ(t)^{n-1}, in linear and log form"""

    def __init__(self, manifold: ModelManifold):
        self.manifold = manifold
        self.log_fiber_volume = math.log(manifold.fiber_volume)
        self.log_omega = log_sphere_area(manifold.base_dim - 1)
        self._sigma_power = manifold.base_dim - 1
        self._warp_power = manifold.fiber_dim

    def log_inner(self, t: float) -> float:
        """log of f(t)^ℓ·ω_{n-1}σ(t)^{n-1}, the inner integral of the criterion"""
        value = self.log_omega
        if self._sigma_power:
            value += self._sigma_power * self.manifold.base_profile.log_evaluate(t)
        if self._warp_power:
            value += self._warp_power * self.manifold.warp.log_evaluate(t)
        return value

    def inner(self, t: float) -> float:
        return _exp(self.log_inner(t), "criterion inner integral")

    def log_value(self, t: float) -> float:
        return self.log_fiber_volume + self.log_inner(t)

    def value(self, t: float) -> float:
        return _exp(self.log_value(t), "flux density")

    __call__ = value

    def factors(self, t: float) -> Dict[str, float]:
        """The three log factors of S(t), for diagnostics"""
        m = self.manifold
        warp_part = self._warp_power * m.warp.log_evaluate(t) if self._warp_power else 0.0
        base_part = self.log_omega
        if self._sigma_power:
            base_part += self._sigma_power * m.base_profile.log_evaluate(t)
        return {
            "log_fiber_volume": self.log_fiber_volume,
            "log_warp_power": warp_part,
            "log_base_area": base_part,
        }

    def p_flux(self, r: float, p: float) -> float:
        """p-flux of the radial height function at level r.

        The height h is the distance to the centre of the base, so
        |∇h| = 1 off the core and the flux is the boundary measure S(r).
        """
        if p <= 1.0:
            raise ValueError(f"p must exceed 1, got {p}")
        return self.value(r)


def _exp(x: float, what: str) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        raise ProfileOverflowError(f"{what} overflows (log value {x})")


def flux_density(manifold: ModelManifold) -> FluxDensity:
    return FluxDensity(manifold)


def criterion_inner(manifold: ModelManifold, t: float) -> float:
    """f(t)^ℓ·ω_{n-1}σ(t)^{n-1} = S(t)/vol(L)"""
    return FluxDensity(manifold).inner(t)


def criterion_inner_log(manifold: ModelManifold, t: float) -> float:
    return FluxDensity(manifold).log_inner(t)


@dataclass(frozen=True)
class SubmersionSpec:
    """Radially fibered submersion over a model base: Vol(F_x) = V(t) for x ∈ ∂B_t"""

    base_dim: int
    base_profile: ProfileExpr
    fiber_volume_fn: ProfileExpr
    claimed_bound: Optional[float] = None
    inner_radius: float = DEFAULT_INNER_RADIUS
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        if self.base_dim < 1:
            raise ManifoldError(f"base_dim must be >= 1, got {self.base_dim}")
        if self.claimed_bound is not None and not self.claimed_bound > 0.0:
            raise ManifoldError(f"claimed_bound must be positive, got {self.claimed_bound}")
        _check_positive(self.base_profile, "sigma", self.inner_radius)
        _check_positive(self.fiber_volume_fn, "fiber_volume_fn", self.inner_radius)

    @classmethod
    def from_text(
        cls,
        base_dim: int,
        sigma: str,
        fiber_volume_fn: str,
        claimed_bound: Optional[float] = None,
        inner_radius: float = DEFAULT_INNER_RADIUS,
        name: Optional[str] = None,
    ) -> "SubmersionSpec":
        return cls(
            base_dim=base_dim,
            base_profile=_as_expr(sigma),
            fiber_volume_fn=_as_expr(fiber_volume_fn),
            claimed_bound=claimed_bound,
            inner_radius=inner_radius,
            name=name,
        )

    def scaled_fibers(self, factor: float) -> "SubmersionSpec":
        return replace(self, fiber_volume_fn=BinOp("*", Const(factor), self.fiber_volume_fn))


def base_manifold(spec: SubmersionSpec) -> ModelManifold:
    """The base N as a model manifold with trivial fiber"""
    return ModelManifold(
        base_dim=spec.base_dim,
        base_profile=spec.base_profile,
        warp=Const(1.0),
        fiber_dim=0,
        fiber_volume=1.0,
        inner_radius=spec.inner_radius,
        name=f"base of {spec.name}" if spec.name else None,
    )
