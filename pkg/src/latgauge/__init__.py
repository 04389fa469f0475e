"""Exact simulation of iterated 1D gauging and the emergent 2D codes."""

from .groups import (
    Cocycle,
    DualCharacter,
    GroupElement,
    GroupMismatchError,
    GroupSpec,
    PhaseExponent,
    compose,
    enumerate_cocycle_classes,
    pair,
    slant_product,
)
from .operators import (
    MonomialOperator,
    ProductOperator,
    SiteKind,
    StateVector,
    clock_z,
    clock_z_dual,
    commutation_phase,
    multiply,
    projective_x,
    projective_x_dual,
    projective_x_tilde,
    projective_x_tilde_dual,
    shift_x,
    shift_x_dual,
)

__all__ = [
    "Cocycle",
    "DualCharacter",
    "GroupElement",
    "GroupMismatchError",
    "GroupSpec",
    "PhaseExponent",
    "compose",
    "enumerate_cocycle_classes",
    "pair",
    "slant_product",
    "MonomialOperator",
    "ProductOperator",
    "SiteKind",
    "StateVector",
    "clock_z",
    "clock_z_dual",
    "commutation_phase",
    "multiply",
    "projective_x",
    "projective_x_dual",
    "projective_x_tilde",
    "projective_x_tilde_dual",
    "shift_x",
    "shift_x_dual",
]

__version__ = "0.1.0"
