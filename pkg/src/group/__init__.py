"""Heisenberg group H^n and its invariant vector fields."""

from .heisenberg import (
    GroupPoint,
    InvariantField,
    FieldPolynomial,
    Side,
    Axis,
    HeisenbergError,
    DimensionMismatchError,
    GridTooCoarseError,
    multiply,
    inverse,
    apply_field,
    apply_word,
)

__all__ = [
    "GroupPoint",
    "InvariantField",
    "FieldPolynomial",
    "Side",
    "Axis",
    "HeisenbergError",
    "DimensionMismatchError",
    "GridTooCoarseError",
    "multiply",
    "inverse",
    "apply_field",
    "apply_word",
]
