"""Domain services: capacity computation, parabolicity criterion, submersion transfer"""

from .capacity import CapacityEngine, LimitOptions, OptimalProfile, VariationalSolution
from .criterion import ClassifyOptions, ParabolicityService
from .submersion import CutoffFamily, SubmersionService

__all__ = [
    "CapacityEngine",
    "LimitOptions",
    "OptimalProfile",
    "VariationalSolution",
    "ClassifyOptions",
    "ParabolicityService",
    "CutoffFamily",
    "SubmersionService",
]
