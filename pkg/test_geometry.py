"""
Tests for model manifolds, flux densities and submersion data.
"""

import logging
import math

import pytest

from pcapacity.errors import ManifoldError
from pcapacity.models import (
    FluxDensity,
    ModelManifold,
    SubmersionSpec,
    base_manifold,
    criterion_inner,
    criterion_inner_log,
    flux_density,
    log_sphere_area,
    sphere_area,
)


@pytest.mark.parametrize(
    "k, area",
    [(0, 2.0), (1, 2.0 * math.pi), (2, 4.0 * math.pi), (3, 2.0 * math.pi ** 2), (4, 8.0 * math.pi ** 2 / 3.0)],
)
def test_sphere_areas(k, area):
    assert sphere_area(k) == pytest.approx(area, rel=1e-14)
    assert log_sphere_area(k) == pytest.approx(math.log(area), rel=1e-14)


def test_euclidean_flux_density(r3):
    assert flux_density(r3)(2.0) == pytest.approx(16.0 * math.pi, rel=1e-14)
    assert FluxDensity(r3).p_flux(2.0, 3.0) == pytest.approx(16.0 * math.pi, rel=1e-14)


def test_gaussian_warp_density(gaussian_warp):
    density = FluxDensity(gaussian_warp)
    assert density.value(1.0) == pytest.approx(8.0 * math.pi * math.exp(-2.0), rel=1e-14)
    assert criterion_inner(gaussian_warp, 1.0) == pytest.approx(2.0 * math.exp(-2.0), rel=1e-14)
    # far beyond the float range in linear form
    assert criterion_inner_log(gaussian_warp, 1e4) == pytest.approx(math.log(2.0) - 2e8, rel=1e-14)


def test_density_factors_sum_to_log_value(gaussian_warp):
    density = FluxDensity(gaussian_warp)
    factors = density.factors(3.0)
    assert sum(factors.values()) == pytest.approx(density.log_value(3.0), rel=1e-14)
    assert factors["log_warp_power"] == pytest.approx(-18.0)


def test_hyperbolic_density_in_log_form(hyperbolic3):
    expected = math.log(4.0 * math.pi) + 2.0 * (1e6 - math.log(2.0))
    assert FluxDensity(hyperbolic3).log_value(1e6) == pytest.approx(expected, rel=1e-14)


def test_trivial_fiber_ignores_volume(caplog):
    with caplog.at_level(logging.WARNING):
        m = ModelManifold.from_text(base_dim=2, sigma="t", fiber_dim=0, fiber_volume=7.0)
    assert m.fiber_volume == 1.0
    assert "ignoring fiber_volume" in caplog.text


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(base_dim=0, sigma="t"),
        dict(base_dim=2, sigma="t", fiber_dim=-1),
        dict(base_dim=2, sigma="t", fiber_dim=1, fiber_volume=0.0),
        dict(base_dim=2, sigma="t", inner_radius=0.0),
        dict(base_dim=2, sigma="t - 5"),
        dict(base_dim=2, sigma="t", warp="2 - t", fiber_dim=1),
    ],
)
def test_invalid_manifolds(kwargs):
    with pytest.raises(ManifoldError):
        ModelManifold.from_text(**kwargs)


def test_negative_warp_allowed_for_trivial_fiber():
    m = ModelManifold.from_text(base_dim=2, sigma="t", warp="2 - t", fiber_dim=0)
    assert FluxDensity(m).value(1.0) == pytest.approx(2.0 * math.pi)


def test_scaling_multiplies_density(gaussian_warp):
    scaled = gaussian_warp.scaled(warp_factor=2.0, volume_factor=3.0)
    ratio = FluxDensity(scaled).value(1.5) / FluxDensity(gaussian_warp).value(1.5)
    assert ratio == pytest.approx(12.0, rel=1e-14)


def test_names_do_not_affect_equality():
    assert ModelManifold.from_text(2, "t", name="plane") == ModelManifold.from_text(2, "t", name="R2")


def test_submersion_base(plane_unit_fibers):
    base = base_manifold(plane_unit_fibers)
    assert base.base_dim == 2
    assert base.fiber_dim == 0
    assert FluxDensity(base).value(3.0) == pytest.approx(6.0 * math.pi)


def test_submersion_validation():
    with pytest.raises(ManifoldError):
        SubmersionSpec.from_text(base_dim=2, sigma="t", fiber_volume_fn="t - 5")
    with pytest.raises(ManifoldError):
        SubmersionSpec.from_text(base_dim=2, sigma="t", fiber_volume_fn="1", claimed_bound=0.0)


def test_scaled_fibers(plane_unit_fibers):
    doubled = plane_unit_fibers.scaled_fibers(2.0)
    assert doubled.fiber_volume_fn.evaluate(5.0) == 2.0
