"""Truncated Segal-Bargmann (Fock) picture of the oscillator."""

import logging
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.linalg import expm

from ..group.heisenberg import GroupPoint

logger = logging.getLogger(__name__)

DEFAULT_DIM = 64
LEAKAGE_TOL = 1e-6
EXTENSION = 48


class FockError(Exception):
    """Base exception for Fock-space errors."""
    pass


class TruncationLeakageError(FockError):
    """The truncated basis drops more than the tolerated share of the norm."""
    pass


def _finite_complex(values, name: str) -> np.ndarray:
    array = np.asarray(values, dtype=complex)
    if not np.all(np.isfinite(array)):
        raise FockError(f"{name} entries must be finite")
    return array


@dataclass(frozen=True, eq=False)
class FockVec:
    """Coefficients c_m of Σ c_m z^m/√(m!) for m < D."""

    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        coeffs = _finite_complex(self.coeffs, "FockVec")
        if coeffs.ndim != 1 or coeffs.size < 1:
            raise FockError(f"FockVec needs a non-empty 1-D array, got shape {coeffs.shape}")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def dim_cut(self) -> int:
        return self.coeffs.size

    @classmethod
    def basis(cls, D: int, m: int) -> "FockVec":
        if not 0 <= m < D:
            raise FockError(f"Basis index {m} outside 0..{D - 1}")
        coeffs = np.zeros(D, dtype=complex)
        coeffs[m] = 1.0
        return cls(coeffs)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def distance(self, other: "FockVec") -> float:
        scale = max(self.norm(), other.norm())
        if scale == 0.0:
            return 0.0
        return float(np.linalg.norm(self.coeffs - other.coeffs) / scale)

    def to_dict(self) -> dict:
        return {
            "dim_cut": self.dim_cut,
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FockVec":
        coeffs = np.array([complex(re, im) for re, im in data["coeffs"]])
        if coeffs.size != int(data["dim_cut"]):
            raise FockError("dim_cut disagrees with the number of coefficients")
        return cls(coeffs)


@dataclass(frozen=True, eq=False)
class FockOp:
    """D×D matrix acting on FockVec coefficients."""

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        matrix = _finite_complex(self.matrix, "FockOp")
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise FockError(f"FockOp needs a square matrix, got shape {matrix.shape}")
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim_cut(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, f: FockVec) -> FockVec:
        if f.dim_cut != self.dim_cut:
            raise FockError(f"Dimension mismatch: operator {self.dim_cut}, vector {f.dim_cut}")
        return FockVec(self.matrix @ f.coeffs)

    def __matmul__(self, other: "FockOp") -> "FockOp":
        return FockOp(self.matrix @ other.matrix)

    def __sub__(self, other: "FockOp") -> "FockOp":
        return FockOp(self.matrix - other.matrix)

    def spectrum(self) -> np.ndarray:
        """Eigenvalues sorted by real part."""
        values = np.linalg.eigvals(self.matrix)
        return values[np.argsort(values.real)]

    def to_dict(self) -> dict:
        return {
            "dim_cut": self.dim_cut,
            "matrix": [[[float(c.real), float(c.imag)] for c in row] for row in self.matrix],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FockOp":
        matrix = np.array([[complex(re, im) for re, im in row] for row in data["matrix"]])
        if matrix.shape != (int(data["dim_cut"]),) * 2:
            raise FockError("dim_cut disagrees with the matrix shape")
        return cls(matrix)


def _check_dim(D: int, minimum: int = 1) -> None:
    if D < minimum:
        raise FockError(f"Truncation D must be at least {minimum}, got {D}")


def creation(D: int) -> FockOp:
    """a⁺ = multiplication by z, truncated: z^{D-1} is sent out of the space."""
    _check_dim(D)
    return FockOp(np.diag(np.sqrt(np.arange(1, D)), k=-1).astype(complex))


def annihilation(D: int) -> FockOp:
    """a⁻ = ∂/∂z, exact on polynomials of degree < D."""
    _check_dim(D)
    return FockOp(np.diag(np.sqrt(np.arange(1, D)), k=1).astype(complex))


def number_operator(D: int) -> FockOp:
    """N = z ∂/∂z = diag(0, 1, ..., D-1)."""
    _check_dim(D)
    return FockOp(np.diag(np.arange(D)).astype(complex))


def euler_operator(
    D: int,
    n: int = 1,
    form: Literal["generator", "display"] = "display",
) -> FockOp:
    """
    Euler operator on the truncated monomial basis.

    Args:
        D: Truncation, at least 2
        n: Number of degrees of freedom
        form: "display" gives ½(nI + N), so D = 4, n = 1 is diag(½, 1, 3/2, 2);
            "generator" gives (n/2)I + N, whose exponential is the dynamical group

    Returns:
        Diagonal FockOp
    """
    _check_dim(D, 2)
    m = np.arange(D, dtype=float)
    if form == "generator":
        diagonal = 0.5 * n + m
    elif form == "display":
        diagonal = 0.5 * (n + m)
    else:
        raise FockError(f"Unknown Euler operator form: {form}")
    return FockOp(np.diag(diagonal).astype(complex))


def dynamical_group(f: FockVec, t: float, n: int = 1) -> FockVec:
    """e^{itT}f(z) = e^{int/2} f(e^{it}z): coefficient m gains the phase e^{it(n/2 + m)}."""
    m = np.arange(f.dim_cut)
    return FockVec(f.coeffs * np.exp(1j * t * (0.5 * n + m)))


def beta_operator(g: GroupPoint, hbar: float, D: int, extension: int = EXTENSION) -> np.ndarray:
    """
    Matrix of β_ħ(g) from the D-dimensional space into D + extension dimensions.

    With z = x + iy, β_ħ(g) = e^{-2isħ - ħ|z|²/2} e^{i√ħ z a⁺} e^{i√ħ z̄ a⁻}.
    """
    if hbar <= 0:
        raise FockError(f"ħ must be positive, got {hbar}")
    if g.n != 1:
        raise FockError(f"Fock action is implemented for n = 1, got {g.n}")
    _check_dim(D)
    z = complex(g.x[0], g.y[0])
    root = np.sqrt(hbar)
    size = D + extension
    raise_op = expm(1j * root * z * creation(size).matrix)
    shift = expm(1j * root * np.conj(z) * annihilation(size).matrix)
    scalar = np.exp(-2j * g.s * hbar - 0.5 * hbar * abs(z) ** 2)
    return scalar * (raise_op @ shift)[:, :D]


def beta_action(
    g: GroupPoint,
    hbar: float,
    f: FockVec,
    leakage_tol: float = LEAKAGE_TOL,
) -> FockVec:
    """
    β_ħ(g)f(w) = exp(-2isħ + i√ħ zw - ħ|z|²/2) f(w + i√ħ z̄) in the truncated basis.

    Raises:
        TruncationLeakageError: If the share of the norm pushed past D exceeds leakage_tol
    """
    D = f.dim_cut
    full = beta_operator(g, hbar, D) @ f.coeffs
    total = np.linalg.norm(full)
    leakage = float(np.linalg.norm(full[D:]) / total) if total > 0 else 0.0
    if leakage > leakage_tol:
        logger.error(f"Truncation leakage {leakage:.3e} exceeds {leakage_tol:.1e} at D = {D}")
        raise TruncationLeakageError(
            f"Leakage {leakage:.3e} > {leakage_tol:.1e}; increase D (currently {D})"
        )
    logger.debug(f"beta_action: D={D}, leakage={leakage:.2e}")
    return FockVec(full[:D])
