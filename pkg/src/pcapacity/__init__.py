"""
p-Capacity Engine

Numerical p-capacities and p-parabolicity verdicts for model warped products
N ×_f L over rotationally symmetric bases, computed from the boundary
measure S(t) of the exhaustion D_t = B_t ×_f L:
- capacities Cap_p(D, D_R) by a closed-form flux integral and by direct
  minimization of the radial p-energy
- parabolicity by divergence of ∫ S^{1/(1-p)} dt with tail asymptotics
- transfer of parabolicity through submersions with bounded fibers

This package provides the profile language, geometry models, numerical
services and a command-line front end (`python -m pcapacity`).
"""

__version__ = "1.0.0"
__author__ = "p-Capacity Engine Developers"

# Import main components
from .models import ModelManifold, SubmersionSpec
from .profiles import parse
from .services import CapacityEngine, ParabolicityService, SubmersionService

__all__ = [
    "ModelManifold",
    "SubmersionSpec",
    "parse",
    "CapacityEngine",
    "ParabolicityService",
    "SubmersionService",
]
