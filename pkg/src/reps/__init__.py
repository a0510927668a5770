"""Representations of the convolution algebra: Schrödinger, classical and Fock pictures."""

from .schrodinger import (
    BracketImageReport,
    ClassicalSymbol,
    PhaseLattice,
    QuadratureBudgetError,
    RepresentationError,
    ShiftOutOfRangeError,
    Sign,
    WaveGrid,
    WaveOp,
    WeylConfig,
    check_bracket_images,
    mixed_transform,
    operator_norm,
    rep_classical,
    rep_group_element,
    rep_quantize,
    weyl_quantize,
    weyl_symbol,
)
from .bargmann import (
    FockError,
    FockOp,
    FockVec,
    TruncationLeakageError,
    annihilation,
    beta_action,
    creation,
    dynamical_group,
    euler_operator,
)

__all__ = [
    "BracketImageReport",
    "ClassicalSymbol",
    "PhaseLattice",
    "QuadratureBudgetError",
    "RepresentationError",
    "ShiftOutOfRangeError",
    "Sign",
    "WaveGrid",
    "WaveOp",
    "WeylConfig",
    "check_bracket_images",
    "mixed_transform",
    "operator_norm",
    "rep_classical",
    "rep_group_element",
    "rep_quantize",
    "weyl_quantize",
    "weyl_symbol",
    "FockError",
    "FockOp",
    "FockVec",
    "TruncationLeakageError",
    "annihilation",
    "beta_action",
    "creation",
    "dynamical_group",
    "euler_operator",
]
