"""Antiderivative in the central variable and the p-mechanical bracket."""

import logging
from enum import Enum
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid

from ..grid.gridfn import (
    NotInL1vError,
    PFunction,
    check_l1v,
    fourier_s,
    inverse_fourier_s,
    s_moment,
    spectral_derivative,
)
from .convolution import convolve_fast

logger = logging.getLogger(__name__)

L1V_RTOL = 1e-6
BRACKET_L1V_RTOL = 1e-10

# (derivative order, weight / h^order) of the Euler-Maclaurin end corrections
EULER_MACLAURIN = (
    (2, -1.0 / 12.0),
    (4, 1.0 / 720.0),
    (6, -1.0 / 30240.0),
    (8, 1.0 / 1209600.0),
    (10, -1.0 / 47900160.0),
)


class BracketError(Exception):
    """Base exception for antiderivative and bracket errors."""
    pass


class AntiMode(str, Enum):
    GRID_CUMULATIVE = "grid_cumulative"
    FOURIER_DIVISION = "fourier_division"


def _fourier_division(f: PFunction) -> PFunction:
    sf = fourier_s(f)
    zero = sf.zero_mask
    slices = np.empty_like(sf.slices)
    hbar = sf.hbar_grid[~zero][:, np.newaxis, np.newaxis]
    slices[~zero] = sf.slices[~zero] / (1j * hbar)
    # ħ = 0: the transform of 𝒜f there is -(2π)^{-1/2} ∫ s f ds
    slices[zero] = -s_moment(f) / np.sqrt(2.0 * np.pi)
    return inverse_fourier_s(type(sf)(sf.spec, slices, sf.hbar_grid))


def _grid_cumulative(f: PFunction) -> PFunction:
    h = f.spec.h_s
    values = f.values
    integral = cumulative_trapezoid(values, dx=h, axis=0, initial=0)
    # Euler-Maclaurin endpoint corrections lift the trapezoid rule to spectral accuracy
    for order, weight in EULER_MACLAURIN:
        d = spectral_derivative(values, 0, h, order=order - 1)
        integral = integral + weight * h ** order * (d - d[0:1])
    return f.with_values(integral)


def _antiderivative(f: PFunction, mode: AntiMode) -> PFunction:
    logger.debug(f"Antiderivative ({mode.value}) on grid {f.spec.shape}")
    if mode == AntiMode.FOURIER_DIVISION:
        return _fourier_division(f)
    return _grid_cumulative(f)


def _mode(mode: AntiMode) -> AntiMode:
    try:
        return AntiMode(mode)
    except ValueError:
        raise BracketError(f"Unknown antiderivative mode: {mode}") from None


def apply_antiderivative(
    f: PFunction,
    mode: AntiMode = AntiMode.FOURIER_DIVISION,
    rtol: float = L1V_RTOL,
) -> PFunction:
    """
    Antiderivative 𝒜f(s, x, y) = ∫_{-∞}^{s} f(t, x, y) dt.

    Args:
        f: Observable whose s-profiles have vanishing mean
        mode: fourier_division divides ħ ≠ 0 slices by iħ and fills the zero
            slice from the first s-moment; grid_cumulative integrates from the
            left edge of the grid
        rtol: Relative tolerance of the vanishing-mean check

    Returns:
        𝒜f on the same grid

    Raises:
        NotInL1vError: If some s-line of f has nonzero mean
    """
    mode = _mode(mode)
    check_l1v(f, rtol)
    return _antiderivative(f, mode)


def pbracket(
    k1: PFunction,
    k2: PFunction,
    mode: AntiMode = AntiMode.FOURIER_DIVISION,
    threshold: Optional[float] = 0.01,
) -> PFunction:
    """
    p-mechanical bracket {{k1, k2}} = 𝒜(k1∗k2 - k2∗k1).

    The s-mean of the commutator is measured against the s-mass of the two
    products, so it has to vanish to rounding, not merely relative to the
    commutator itself.

    Raises:
        NotInL1vError: If the commutator fails the vanishing-mean check
    """
    mode = _mode(mode)
    forward = convolve_fast(k1, k2, threshold)
    backward = convolve_fast(k2, k1, threshold)
    c = forward - backward
    mass = max(
        float(np.sum(np.abs(p.values), axis=0).max()) for p in (forward, backward)
    )
    try:
        check_l1v(c, BRACKET_L1V_RTOL, scale=mass)
    except NotInL1vError:
        logger.error("Commutator failed the L1_v check; ħ = 0 slices do not commute")
        raise
    return _antiderivative(c, mode)
