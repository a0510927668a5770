"""Convolution algebra of H¹: group convolution, antiderivative and brackets."""

from .convolution import (
    ConvolutionError,
    GridMismatchError,
    OracleSizeError,
    OracleSample,
    convolve_direct,
    convolve_fast,
    commutator,
)
from .pbracket import AntiMode, BracketError, apply_antiderivative, pbracket

__all__ = [
    "ConvolutionError",
    "GridMismatchError",
    "OracleSizeError",
    "OracleSample",
    "convolve_direct",
    "convolve_fast",
    "commutator",
    "AntiMode",
    "BracketError",
    "apply_antiderivative",
    "pbracket",
]
