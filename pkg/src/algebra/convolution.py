"""Group convolution on H¹: ħ-sliced twisted convolution and the direct quadrature oracle."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import fft as sfft

from ..grid.gridfn import PFunction, shift_interp
from ..group.heisenberg import left_quotient_coords

logger = logging.getLogger(__name__)

ORACLE_MAX_POINTS = 16 ** 3


class ConvolutionError(Exception):
    """Base exception for convolution errors."""
    pass


class GridMismatchError(ConvolutionError):
    """Operands live on different grids."""
    pass


class OracleSizeError(ConvolutionError):
    """The full direct oracle was requested on too large a grid."""
    pass


@dataclass(frozen=True)
class OracleSample:
    """Direct-oracle values at a subset of output nodes."""

    indices: np.ndarray
    values: np.ndarray

    def pick(self, k: PFunction) -> np.ndarray:
        """Values of k at the same nodes."""
        a, i, j = self.indices.T
        return k.values[a, i, j]


def _check_operands(k1: PFunction, k2: PFunction, threshold: Optional[float]) -> None:
    if k1.spec != k2.spec:
        raise GridMismatchError(f"Grid mismatch: {k1.spec} vs {k2.spec}")
    if threshold is not None:
        k1.admit(threshold)
        k2.admit(threshold)


def _pad_xy(values: np.ndarray) -> np.ndarray:
    """Zero-pad the x and y axes to twice their length, data in the centre."""
    return np.pad(values, [(0, 0)] + [(n // 2, n - n // 2) for n in values.shape[1:]])


def _crop_xy(values: np.ndarray) -> np.ndarray:
    return values[(slice(None),) + tuple(slice(n // 4, n // 4 + n // 2) for n in values.shape[1:])]


def _centred_coords(n: int, spacing: float) -> np.ndarray:
    """Coordinates in FFT (zero-first) order."""
    return sfft.fftfreq(n) * n * spacing


def _twisted_slice(A: np.ndarray, B: np.ndarray, hbar: float, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """
    ∬ A(x', y') B(x - x', y - y') e^{iħ(x y' - x' y)/2} dx' dy' on a circular grid.

    A and B are in zero-first order; the y sum is done by FFT for each
    (x, x') pair, the x' sum directly.
    """
    Mx = A.shape[0]
    rows = np.arange(Mx)
    # P[x, x', y'] = A[x', y'] e^{iħ x y'/2}
    P = A[np.newaxis, :, :] * np.exp(0.5j * hbar * X[:, np.newaxis, np.newaxis] * Y[np.newaxis, np.newaxis, :])
    Bg = B[(rows[:, np.newaxis] - rows[np.newaxis, :]) % Mx]
    conv = sfft.ifft(sfft.fft(P, axis=-1) * sfft.fft(Bg, axis=-1), axis=-1)
    conv *= np.exp(-0.5j * hbar * X[np.newaxis, :, np.newaxis] * Y[np.newaxis, np.newaxis, :])
    return conv.sum(axis=1)


def convolve_fast(k1: PFunction, k2: PFunction, threshold: Optional[float] = 0.01) -> PFunction:
    """
    Group convolution (k1∗k2)(g) = ∫ k1(h) k2(h⁻¹g) dh via twisted convolutions.

    Both inputs are transformed along s and combined slice by slice with the
    phase e^{+iħ(x y' - x' y)/2}. The x and y axes are zero-padded to twice
    the grid and cropped back afterwards. The s axis is periodic: the product
    lives on the group whose centre is the circle of length 2·L_s, so no mass
    leaves the grid along s and the ħ = 0 slices of k1∗k2 and k2∗k1 agree to
    rounding.

    Args:
        k1: Left factor
        k2: Right factor
        threshold: Tail-mass guard; None skips admission

    Returns:
        k1∗k2 on the common grid

    Raises:
        GridMismatchError: If the grids differ
        DomainTooSmallError: If an operand fails the tail guard
    """
    _check_operands(k1, k2, threshold)
    spec = k1.spec
    h_s, h_x, h_y = spec.spacings
    logger.debug(f"convolve_fast on grid {spec.shape}")

    A = h_s * sfft.fft(sfft.ifftshift(_pad_xy(k1.values)), axis=0)
    B = h_s * sfft.fft(sfft.ifftshift(_pad_xy(k2.values)), axis=0)
    Ms, Mx, My = A.shape
    X = _centred_coords(Mx, h_x)
    Y = _centred_coords(My, h_y)
    hbars = 2.0 * np.pi * sfft.fftfreq(Ms, h_s)

    out = np.empty_like(A)
    for m, hbar in enumerate(hbars):
        out[m] = _twisted_slice(A[m], B[m], hbar, X, Y)
    out *= h_x * h_y

    values = sfft.fftshift(sfft.ifft(out, axis=0) / h_s)
    return PFunction(spec, _crop_xy(values))


def _direct_column(k1: PFunction, k2: PFunction, i: int, j: int) -> np.ndarray:
    """Oracle values along s at the output node (x_i, y_j)."""
    spec = k1.spec
    N_s, N_x, N_y = spec.shape
    x, y = spec.x, spec.y
    ip, jp = np.meshgrid(np.arange(N_x), np.arange(N_y), indexing="ij")
    ip, jp = ip.ravel(), jp.ravel()
    # grid index of the node at coordinate x_i - x_i' is i - i' + N/2
    di = i - ip + N_x // 2
    dj = j - jp + N_y // 2
    inside = (di >= 0) & (di < N_x) & (dj >= 0) & (dj < N_y)
    ip, jp, di, dj = ip[inside], jp[inside], di[inside], dj[inside]

    # central coordinate of h⁻¹g at s = s' = 0 is the twist
    twist, _, _ = left_quotient_coords(0.0, x[ip], y[jp], 0.0, x[i], y[j])
    lines = k2.values[:, di, dj].T
    shifted = shift_interp(lines, twist, spec.h_s)

    a = np.arange(N_s)
    # s_a - s_b sits at index a - b + N_s/2 of the periodic s-line
    gather = (a[:, np.newaxis] - a[np.newaxis, :] + N_s // 2) % N_s
    L2 = shifted[:, gather]
    k1_lines = k1.values[:, ip, jp]
    return np.einsum("bp,pab->a", k1_lines, L2) * spec.cell_volume


def convolve_direct(
    k1: PFunction,
    k2: PFunction,
    subset: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    threshold: Optional[float] = 0.01,
):
    """
    Direct quadrature of ∫ k1(h) k2(h⁻¹g) dh for every output node.

    Off-grid central arguments are evaluated by spectral interpolation of
    the s-lines of k2. The s axis is periodic, as in `convolve_fast`; x and
    y are not, and nodes outside the grid contribute nothing.

    Args:
        k1: Left factor
        k2: Right factor
        subset: Number of random output nodes; None requests the full grid
        rng: Generator for subset selection
        threshold: Tail-mass guard; None skips admission

    Returns:
        PFunction in full mode, OracleSample in subset mode

    Raises:
        GridMismatchError: If the grids differ
        OracleSizeError: If full mode is requested beyond 16^3 nodes
    """
    _check_operands(k1, k2, threshold)
    spec = k1.spec

    if subset is None:
        if spec.size > ORACLE_MAX_POINTS:
            logger.error(f"Full oracle refused on {spec.shape}")
            raise OracleSizeError(
                f"Full direct convolution is limited to {ORACLE_MAX_POINTS} nodes, "
                f"grid has {spec.size}; request subset mode"
            )
        values = np.empty(spec.shape, dtype=complex)
        for i in range(spec.N_x):
            for j in range(spec.N_y):
                values[:, i, j] = _direct_column(k1, k2, i, j)
        return PFunction(spec, values)

    rng = rng if rng is not None else np.random.default_rng(0)
    flat = rng.choice(spec.size, size=min(subset, spec.size), replace=False)
    indices = np.stack(np.unravel_index(flat, spec.shape), axis=1)
    logger.info(f"Direct oracle in subset mode: {len(indices)} of {spec.size} nodes")
    values = np.empty(len(indices), dtype=complex)
    columns = {}
    for n, (a, i, j) in enumerate(indices):
        key = (int(i), int(j))
        if key not in columns:
            columns[key] = _direct_column(k1, k2, *key)
        values[n] = columns[key][a]
    return OracleSample(indices, values)


def commutator(k1: PFunction, k2: PFunction, threshold: Optional[float] = 0.01) -> PFunction:
    """k1∗k2 - k2∗k1."""
    return convolve_fast(k1, k2, threshold) - convolve_fast(k2, k1, threshold)
