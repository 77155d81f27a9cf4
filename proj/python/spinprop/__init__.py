"""Semiclassical coherent-state propagator for a boson mode coupled to a spin."""

from ._spinprop import (
    SolverError,
    TruncationError,
    determinant_oracle,
    exact,
    overlap_canonical,
    overlap_spin,
    propagate,
    scan,
)

__all__ = [
    "SolverError",
    "TruncationError",
    "determinant_oracle",
    "exact",
    "overlap_canonical",
    "overlap_spin",
    "propagate",
    "scan",
]
