"""Rational points with small canonical height for quadratic maps over Q."""

from .arith import INFINITY, DomainError, P1Point, PreconditionError
from .dynamics import QuadRatMap, canonical_height, refine_canonical_height, sigma_invariants

__all__ = [
    "INFINITY",
    "DomainError",
    "P1Point",
    "PreconditionError",
    "QuadRatMap",
    "canonical_height",
    "refine_canonical_height",
    "sigma_invariants",
]
__version__ = "0.1.0"
