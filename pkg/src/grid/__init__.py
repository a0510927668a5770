"""Grids, sampled observables and the analytic signal catalog."""

from .gridfn import (
    GridSpec,
    PFunction,
    SlicedFunction,
    GridError,
    InvalidGridError,
    DomainTooSmallError,
    NotInL1vError,
    sample,
    fourier_s,
    inverse_fourier_s,
    shift_interp,
    quadrature,
)
from .catalog import TestSignal, Factor, CatalogError, get_signal, random_signal

__all__ = [
    "GridSpec",
    "PFunction",
    "SlicedFunction",
    "GridError",
    "InvalidGridError",
    "DomainTooSmallError",
    "NotInL1vError",
    "sample",
    "fourier_s",
    "inverse_fourier_s",
    "shift_interp",
    "quadrature",
    "TestSignal",
    "Factor",
    "CatalogError",
    "get_signal",
    "random_signal",
]
