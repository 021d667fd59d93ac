"""
Shared fixtures for the p-capacity test suite.
"""

import json
import math
import sys
from pathlib import Path

import pytest

# Add the src directory to the Python path
src_dir = Path(__file__).parent / "src"
sys.path.insert(0, str(src_dir))

from pcapacity.models import ModelManifold, SubmersionSpec  # noqa: E402
from pcapacity.services import CapacityEngine, ParabolicityService, SubmersionService  # noqa: E402

SPECS_DIR = Path(__file__).parent / "specs"


def euclidean(n: int) -> ModelManifold:
    """ℝⁿ as a model manifold: σ(t) = t, trivial fiber"""
    return ModelManifold.from_text(base_dim=n, sigma="t", name=f"R{n}")


@pytest.fixture
def specs_dir() -> Path:
    return SPECS_DIR


@pytest.fixture
def engine() -> CapacityEngine:
    return CapacityEngine()


@pytest.fixture
def criterion() -> ParabolicityService:
    return ParabolicityService()


@pytest.fixture
def submersions() -> SubmersionService:
    return SubmersionService()


@pytest.fixture
def r2() -> ModelManifold:
    return euclidean(2)


@pytest.fixture
def r3() -> ModelManifold:
    return euclidean(3)


@pytest.fixture
def hyperbolic3() -> ModelManifold:
    return ModelManifold.from_text(base_dim=3, sigma="sinh(t)", name="H3")


@pytest.fixture
def gaussian_warp() -> ModelManifold:
    """ℝ ×_f 𝕊² with f = exp(-t²)"""
    return ModelManifold.from_text(
        base_dim=1, sigma="1", warp="exp(-t^2)", fiber_dim=2, fiber_volume=4 * math.pi, name="gaussian_warp"
    )


@pytest.fixture
def constant_s() -> ModelManifold:
    """S ≡ 1: one-dimensional base (ω_0 = 2) with fiber volume 1/2"""
    return ModelManifold.from_text(base_dim=1, sigma="1", warp="1", fiber_dim=1, fiber_volume=0.5, name="S=1")


@pytest.fixture
def plane_unit_fibers() -> SubmersionSpec:
    return SubmersionSpec.from_text(base_dim=2, sigma="t", fiber_volume_fn="1", claimed_bound=1.0)


@pytest.fixture
def write_spec(tmp_path):
    """Write a spec document to a temporary file and return its path"""

    def _write(document, name: str = "spec.json") -> str:
        path = tmp_path / name
        text = document if isinstance(document, str) else json.dumps(document)
        path.write_text(text, encoding="utf-8")
        return str(path)

    return _write
