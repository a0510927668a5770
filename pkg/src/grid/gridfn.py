"""Sampled observables on H¹: grids, quadrature, s-Fourier transforms and interpolation."""

import logging
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import TYPE_CHECKING, Callable, Optional, Tuple, Union

import numpy as np
from scipy import fft as sfft

if TYPE_CHECKING:
    from .catalog import TestSignal

logger = logging.getLogger(__name__)

TAIL_THRESHOLD = 0.01
TAIL_SHELL = 0.9
MIN_POINTS = 16

Weight = Union[np.ndarray, Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray], None]


class GridError(Exception):
    """Base exception for grid errors."""
    pass


class InvalidGridError(GridError):
    """Grid parameters violate the sampling rules."""
    pass


class DomainTooSmallError(GridError):
    """Too much of the function's mass sits near the periodic boundary."""
    pass


class NotInL1vError(GridError):
    """Function fails the vanishing s-mean check required by the antiderivative."""
    pass


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """
    Uniform periodic grid on [-L_s, L_s) x [-L_x, L_x) x [-L_y, L_y).

    Node j on an axis sits at -L + j*h with h = 2L/N.
    """

    L_s: float
    L_x: float
    L_y: float
    N_s: int
    N_x: int
    N_y: int

    def __post_init__(self):
        for name in ("L_s", "L_x", "L_y"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise InvalidGridError(f"{name} must be a positive real, got {value}")
        for name in ("N_s", "N_x", "N_y"):
            value = getattr(self, name)
            if not _is_power_of_two(int(value)) or value < MIN_POINTS:
                raise InvalidGridError(
                    f"{name} must be a power of two >= {MIN_POINTS}, got {value}"
                )

    @classmethod
    def cube(cls, L: float, N: int) -> "GridSpec":
        """Same extent and sample count on every axis."""
        return cls(L, L, L, N, N, N)

    @property
    def shape(self) -> Tuple[int, int, int]:
        return (self.N_s, self.N_x, self.N_y)

    @property
    def size(self) -> int:
        return self.N_s * self.N_x * self.N_y

    @property
    def extents(self) -> Tuple[float, float, float]:
        return (self.L_s, self.L_x, self.L_y)

    @property
    def h_s(self) -> float:
        return 2.0 * self.L_s / self.N_s

    @property
    def h_x(self) -> float:
        return 2.0 * self.L_x / self.N_x

    @property
    def h_y(self) -> float:
        return 2.0 * self.L_y / self.N_y

    @property
    def spacings(self) -> Tuple[float, float, float]:
        return (self.h_s, self.h_x, self.h_y)

    @property
    def cell_volume(self) -> float:
        return self.h_s * self.h_x * self.h_y

    def nodes(self, axis: int) -> np.ndarray:
        """Coordinates along one axis (0 = s, 1 = x, 2 = y)."""
        L = self.extents[axis]
        N = self.shape[axis]
        return -L + np.arange(N) * (2.0 * L / N)

    @property
    def s(self) -> np.ndarray:
        return self.nodes(0)

    @property
    def x(self) -> np.ndarray:
        return self.nodes(1)

    @property
    def y(self) -> np.ndarray:
        return self.nodes(2)

    def mesh(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Full coordinate arrays S, X, Y of the grid shape."""
        return np.meshgrid(self.s, self.x, self.y, indexing="ij")

    def padded(self) -> "GridSpec":
        """Grid of twice the extent and twice the points, same spacing."""
        return GridSpec(
            2 * self.L_s, 2 * self.L_x, 2 * self.L_y,
            2 * self.N_s, 2 * self.N_x, 2 * self.N_y,
        )

    def to_dict(self) -> dict:
        return {
            "L_s": self.L_s, "L_x": self.L_x, "L_y": self.L_y,
            "N_s": self.N_s, "N_x": self.N_x, "N_y": self.N_y,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GridSpec":
        try:
            return cls(
                float(data["L_s"]), float(data["L_x"]), float(data["L_y"]),
                int(data["N_s"]), int(data["N_x"]), int(data["N_y"]),
            )
        except KeyError as e:
            raise InvalidGridError(f"Missing grid field: {e}") from e


@dataclass(frozen=True, eq=False)
class PFunction:
    """
    Complex observable k(s, x, y) sampled on a GridSpec.

    Values are stored s-major with shape (N_s, N_x, N_y).
    """

    spec: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != self.spec.shape:
            raise InvalidGridError(
                f"Values shape {values.shape} does not match grid {self.spec.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidGridError("PFunction values must be finite")
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, spec: GridSpec) -> "PFunction":
        return cls(spec, np.zeros(spec.shape, dtype=complex))

    @classmethod
    def from_callable(
        cls,
        spec: GridSpec,
        fn: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray],
    ) -> "PFunction":
        S, X, Y = spec.mesh()
        return cls(spec, np.broadcast_to(fn(S, X, Y), spec.shape).astype(complex))

    @cached_property
    def tail_mass(self) -> float:
        """Fraction of L1 mass with some coordinate in the outer 10% shell."""
        magnitude = np.abs(self.values)
        total = magnitude.sum()
        if total == 0.0:
            return 0.0
        S, X, Y = self.spec.mesh()
        shell = (
            (np.abs(S) >= TAIL_SHELL * self.spec.L_s)
            | (np.abs(X) >= TAIL_SHELL * self.spec.L_x)
            | (np.abs(Y) >= TAIL_SHELL * self.spec.L_y)
        )
        return float(magnitude[shell].sum() / total)

    def admit(self, threshold: float = TAIL_THRESHOLD) -> "PFunction":
        """
        Check the boundary-leakage guard.

        Raises:
            DomainTooSmallError: If tail_mass >= threshold
        """
        if self.tail_mass >= threshold:
            logger.error(f"Tail mass {self.tail_mass:.3e} exceeds {threshold:.3e}")
            raise DomainTooSmallError(
                f"tail_mass {self.tail_mass:.3e} >= {threshold:.3e}; enlarge the grid extent"
            )
        return self

    def with_values(self, values: np.ndarray) -> "PFunction":
        return replace(self, values=values)

    def _check_same_grid(self, other: "PFunction") -> None:
        if self.spec != other.spec:
            raise InvalidGridError(f"Grid mismatch: {self.spec} vs {other.spec}")

    def __add__(self, other: "PFunction") -> "PFunction":
        self._check_same_grid(other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "PFunction") -> "PFunction":
        self._check_same_grid(other)
        return self.with_values(self.values - other.values)

    def __neg__(self) -> "PFunction":
        return self.with_values(-self.values)

    def __mul__(self, scalar: complex) -> "PFunction":
        return self.with_values(self.values * scalar)

    __rmul__ = __mul__

    def norm(self) -> float:
        """L2 norm with the Haar measure ds dx dy."""
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.spec.cell_volume))

    def l1_norm(self) -> float:
        return float(np.sum(np.abs(self.values)) * self.spec.cell_volume)

    def distance(self, other: "PFunction") -> float:
        """Relative L2 distance ||self - other|| / max(||self||, ||other||)."""
        self._check_same_grid(other)
        scale = max(self.norm(), other.norm())
        if scale == 0.0:
            return 0.0
        return (self - other).norm() / scale


@dataclass(frozen=True, eq=False)
class SlicedFunction:
    """
    Fourier-in-s form of a PFunction.

    Slices are stored in FFT order: slice m belongs to hbar_grid[m], and
    index 0 is the zero slice.
    """

    spec: GridSpec
    slices: np.ndarray = field(repr=False)
    hbar_grid: np.ndarray = field(repr=False)

    @property
    def dual_step(self) -> float:
        return 2.0 * np.pi / (self.spec.N_s * self.spec.h_s)

    @property
    def zero_mask(self) -> np.ndarray:
        """Slices binned as hbar = 0."""
        return np.abs(self.hbar_grid) < 0.5 * self.dual_step

    def inverse(self) -> PFunction:
        return inverse_fourier_s(self)


def sample(
    t: "TestSignal",
    spec: GridSpec,
    threshold: Optional[float] = TAIL_THRESHOLD,
) -> PFunction:
    """
    Evaluate a catalog signal on the grid.

    Args:
        t: Catalog signal with a closed form
        spec: Target grid
        threshold: Tail-mass guard; None disables it

    Returns:
        Sampled PFunction

    Raises:
        DomainTooSmallError: If the sampled function leaks into the boundary shell
    """
    logger.debug(f"Sampling {t.name} on grid {spec.shape}")
    pf = PFunction.from_callable(spec, t.evaluate)
    if threshold is not None:
        pf.admit(threshold)
    return pf


def hbar_grid(spec: GridSpec) -> np.ndarray:
    """Dual frequencies of the s axis in FFT order."""
    return 2.0 * np.pi * sfft.fftfreq(spec.N_s, spec.h_s)


def fourier_s(k: PFunction) -> SlicedFunction:
    """
    Unitary transform along s: (2π)^(-1/2) ∫ k(s, x, y) e^{-isħ} ds.

    The grid node s = 0 is moved to index 0 before the FFT so that the
    phase refers to the true origin.
    """
    spec = k.spec
    shifted = sfft.ifftshift(k.values, axes=0)
    slices = spec.h_s / np.sqrt(2.0 * np.pi) * sfft.fft(shifted, axis=0)
    return SlicedFunction(spec, slices, hbar_grid(spec))


def inverse_fourier_s(sf: SlicedFunction) -> PFunction:
    values = sfft.ifft(sf.slices, axis=0) * np.sqrt(2.0 * np.pi) / sf.spec.h_s
    return PFunction(sf.spec, sfft.fftshift(values, axes=0))


def wavenumbers(n: int, spacing: float) -> np.ndarray:
    return 2.0 * np.pi * sfft.fftfreq(n, spacing)


def shift_interp(
    u: np.ndarray,
    a: Union[float, np.ndarray],
    spacing: float = 1.0,
    axis: int = -1,
) -> np.ndarray:
    """
    Spectral interpolation of u(v + a) on a periodic grid.

    The shift a is measured in the same units as spacing and may be an
    array broadcasting against u with the interpolation axis removed.
    A shift by a whole number of grid steps reproduces np.roll exactly.
    """
    u = np.asarray(u, dtype=complex)
    u_moved = np.moveaxis(u, axis, -1)
    k = wavenumbers(u_moved.shape[-1], spacing)
    a = np.asarray(a, dtype=float)[..., np.newaxis]
    shifted = sfft.ifft(sfft.fft(u_moved, axis=-1) * np.exp(1j * k * a), axis=-1)
    return np.moveaxis(shifted, -1, axis)


def spectral_derivative(values: np.ndarray, axis: int, spacing: float, order: int = 1) -> np.ndarray:
    """Spectral derivative along one axis; the Nyquist mode is dropped for odd orders."""
    n = values.shape[axis]
    k = wavenumbers(n, spacing)
    multiplier = (1j * k) ** order
    if order % 2 == 1:
        multiplier[n // 2] = 0.0
    shape = [1] * values.ndim
    shape[axis] = n
    return sfft.ifft(sfft.fft(values, axis=axis) * multiplier.reshape(shape), axis=axis)


def nyquist_ratio(values: np.ndarray, axis: int) -> float:
    """
    Spectral content in the top band of one axis relative to the peak.

    The top band is the highest eighth of the resolvable frequencies.
    """
    n = values.shape[axis]
    spectrum = np.abs(sfft.fft(values, axis=axis))
    peak = spectrum.max()
    if peak == 0.0:
        return 0.0
    index = np.abs(sfft.fftfreq(n) * n)
    band = index >= (7 * n) // 16
    top = np.take(spectrum, np.flatnonzero(band), axis=axis)
    return float(top.max() / peak)


def quadrature(k: PFunction, weight: Weight = None) -> complex:
    """
    Riemann sum approximating ∫ weight·k ds dx dy.

    Args:
        k: Integrand samples
        weight: Array of the grid shape or callable (S, X, Y) -> array

    Returns:
        Complex integral
    """
    values = k.values
    if callable(weight):
        values = values * weight(*k.spec.mesh())
    elif weight is not None:
        values = values * np.asarray(weight)
    return complex(values.sum() * k.spec.cell_volume)


def s_moment(k: PFunction) -> np.ndarray:
    """First s-moment ∫ s k(s, x, y) ds as an (N_x, N_y) array."""
    s = k.spec.s[:, np.newaxis, np.newaxis]
    return np.sum(s * k.values, axis=0) * k.spec.h_s


def check_l1v(k: PFunction, rtol: float = 1e-6, scale: Optional[float] = None) -> None:
    """
    Proxy membership check for L1_v: the s-mean must vanish on every (x, y) line.

    The mean is measured against scale, by default the largest s-mass of a
    line of k.

    Raises:
        NotInL1vError: If some line carries a relative s-mean above rtol
    """
    mean = np.abs(np.sum(k.values, axis=0))
    if scale is None:
        scale = float(np.sum(np.abs(k.values), axis=0).max())
    if scale == 0.0:
        return
    worst = float(mean.max() / scale)
    if worst > rtol:
        logger.error(f"s-mean check failed: relative mean {worst:.3e} > {rtol:.1e}")
        raise NotInL1vError(
            f"Function has nonzero s-mean (relative {worst:.3e}); not in L1_v"
        )
