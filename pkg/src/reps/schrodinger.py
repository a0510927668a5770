"""Schrödinger and one-dimensional representations of the convolution algebra."""

import logging
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..algebra.convolution import commutator as convolution_commutator
from ..algebra.pbracket import pbracket
from ..grid.catalog import TestSignal, poisson_bracket
from ..grid.gridfn import GridSpec, PFunction, shift_interp, wavenumbers
from ..group.heisenberg import GroupPoint

logger = logging.getLogger(__name__)

QUADRATURE_BUDGET = 50_000_000
SHIFT_SNAP = 1e-9


class RepresentationError(Exception):
    """Base exception for representation errors."""
    pass


class ShiftOutOfRangeError(RepresentationError):
    """The translation √ħ·y leaves the wave grid."""
    pass


class QuadratureBudgetError(RepresentationError):
    """Assembling the operator would exceed the quadrature budget."""
    pass


class Sign(IntEnum):
    PLUS = 1
    MINUS = -1


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class WaveGrid:
    """Periodic grid v_i = -L_v + i·h_v for wavefunctions on the line."""

    L_v: float
    N_v: int

    def __post_init__(self):
        if not self.L_v > 0:
            raise RepresentationError(f"L_v must be positive, got {self.L_v}")
        if not _is_power_of_two(self.N_v) or self.N_v < 32:
            raise RepresentationError(f"N_v must be a power of two >= 32, got {self.N_v}")

    @property
    def h_v(self) -> float:
        return 2.0 * self.L_v / self.N_v

    @property
    def v(self) -> np.ndarray:
        return -self.L_v + np.arange(self.N_v) * self.h_v

    @property
    def nu(self) -> np.ndarray:
        """Dual frequencies in FFT order."""
        return wavenumbers(self.N_v, self.h_v)

    @property
    def half_lattice(self) -> np.ndarray:
        """2·N_v midpoints -L_v + m·h_v/2 used by symmetric quantization."""
        return -self.L_v + np.arange(2 * self.N_v) * (0.5 * self.h_v)

    @classmethod
    def matched(cls, spec: GridSpec, hbar: float, N_v: Optional[int] = None) -> "WaveGrid":
        """
        Wave grid whose step is √ħ·h_y, so every translation √ħ·y_j is a whole step.

        By default N_v is the power of two closest to 2π/(ħ h_x h_y) (at least 32),
        which makes the v range one period of the sampled observables' phases.
        """
        if hbar <= 0:
            raise RepresentationError(f"ħ must be positive, got {hbar}")
        h_v = np.sqrt(hbar) * spec.h_y
        if N_v is None:
            ideal = 2.0 * np.pi / (hbar * spec.h_x * spec.h_y)
            N_v = max(32, int(2 ** round(np.log2(ideal))))
        return cls(0.5 * N_v * h_v, N_v)

    def admissible_hbar(self, spec: GridSpec) -> Tuple[float, float]:
        """Open-closed range (0, ħ_max] keeping √ħ·|y| within the wave grid."""
        return 0.0, (self.L_v / spec.L_y) ** 2

    def hermite(self, n: int) -> np.ndarray:
        """Normalized Hermite function of order n sampled on the grid (unit l2 norm)."""
        v = self.v
        psi_prev = np.zeros_like(v)
        psi = np.pi ** -0.25 * np.exp(-0.5 * v * v)
        for m in range(n):
            psi, psi_prev = np.sqrt(2.0 / (m + 1)) * v * psi - np.sqrt(m / (m + 1)) * psi_prev, psi
        return psi * np.sqrt(self.h_v)


@dataclass(frozen=True, eq=False)
class WaveOp:
    """Matrix realizing ρ_{σħ}(k) on a WaveGrid."""

    hbar: float
    sign: Sign
    grid: WaveGrid
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        n = self.grid.N_v
        if matrix.shape != (n, n):
            raise RepresentationError(f"Matrix shape {matrix.shape} does not match N_v = {n}")
        if not np.all(np.isfinite(matrix)):
            raise RepresentationError("WaveOp entries must be finite")
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "sign", Sign(self.sign))

    def _like(self, matrix: np.ndarray) -> "WaveOp":
        return WaveOp(self.hbar, self.sign, self.grid, matrix)

    def __matmul__(self, other: "WaveOp") -> "WaveOp":
        return self._like(self.matrix @ other.matrix)

    def __add__(self, other: "WaveOp") -> "WaveOp":
        return self._like(self.matrix + other.matrix)

    def __sub__(self, other: "WaveOp") -> "WaveOp":
        return self._like(self.matrix - other.matrix)

    def __mul__(self, scalar: complex) -> "WaveOp":
        return self._like(self.matrix * scalar)

    __rmul__ = __mul__

    def commutator(self, other: "WaveOp") -> "WaveOp":
        return self @ other - other @ self

    def norm(self) -> float:
        return operator_norm(self.matrix)

    def distance(self, other: "WaveOp") -> float:
        """Relative operator-norm distance."""
        scale = max(self.norm(), other.norm())
        if scale == 0.0:
            return 0.0
        return operator_norm(self.matrix - other.matrix) / scale

    def hermitian_defect(self) -> float:
        scale = self.norm()
        if scale == 0.0:
            return 0.0
        return operator_norm(self.matrix - self.matrix.conj().T) / scale


@dataclass(frozen=True)
class PhaseLattice:
    """Rectangular (q, p) evaluation lattice for classical symbols."""

    q_max: float = 3.0
    p_max: float = 3.0
    n_q: int = 13
    n_p: int = 13

    @property
    def q(self) -> np.ndarray:
        return np.linspace(-self.q_max, self.q_max, self.n_q)

    @property
    def p(self) -> np.ndarray:
        return np.linspace(-self.p_max, self.p_max, self.n_p)

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.q, self.p, indexing="ij")


@dataclass(frozen=True, eq=False)
class ClassicalSymbol:
    """Values of k̂(0, q, p) on a PhaseLattice."""

    lattice: PhaseLattice
    values: np.ndarray = field(repr=False)

    def distance(self, other: Union["ClassicalSymbol", np.ndarray]) -> float:
        """Max-norm distance relative to the larger of the two maxima."""
        theirs = other.values if isinstance(other, ClassicalSymbol) else np.asarray(other)
        scale = max(np.max(np.abs(self.values)), np.max(np.abs(theirs)))
        if scale == 0.0:
            return 0.0
        return float(np.max(np.abs(self.values - theirs)) / scale)


@dataclass(frozen=True)
class WeylConfig:
    """Ordering parameter τ of a(τ-point, ν) quantization; τ = ½ is Weyl ordering."""

    tau: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.tau <= 1.0:
            raise RepresentationError(f"tau must lie in [0, 1], got {self.tau}")


def operator_norm(matrix: np.ndarray, iterations: int = 20, tol: float = 1e-10) -> float:
    """
    Largest singular value by power iteration on A^H A.

    Args:
        matrix: Square complex matrix
        iterations: Iteration cap
        tol: Relative change that stops the iteration

    Returns:
        Estimate of ||A||_2
    """
    n = matrix.shape[1]
    x = np.ones(n, dtype=complex) + 1j * np.linspace(-1.0, 1.0, n)
    x /= np.linalg.norm(x)
    estimate = 0.0
    for _ in range(iterations):
        y = matrix.conj().T @ (matrix @ x)
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0
        x = y / norm
        previous, estimate = estimate, np.sqrt(norm)
        if abs(estimate - previous) <= tol * estimate:
            break
    return float(estimate)


def _check_shift(max_shift: float, grid: WaveGrid, spec: Optional[GridSpec], hbar: float) -> None:
    if max_shift > grid.L_v * (1.0 + 1e-12):
        upper = (grid.L_v / spec.L_y) ** 2 if spec is not None else None
        message = f"Translation {max_shift:.3f} exceeds wave-grid half-extent {grid.L_v:.3f}"
        if upper is not None:
            message += f"; admissible ħ range is (0, {upper:.4g}]"
        logger.error(message)
        raise ShiftOutOfRangeError(message)


def shift_matrix(a: float, grid: WaveGrid) -> np.ndarray:
    """Matrix of u ↦ u(v + a); a permutation when a is a whole number of steps."""
    steps = a / grid.h_v
    whole = round(steps)
    if abs(steps - whole) < SHIFT_SNAP:
        return np.roll(np.eye(grid.N_v, dtype=complex), whole, axis=1)
    return shift_interp(np.eye(grid.N_v), a, grid.h_v, axis=0)


def rep_group_element(g: GroupPoint, hbar: float, sign: Sign, grid: WaveGrid) -> WaveOp:
    """
    Matrix of ρ_{σħ}(s, x, y)u(v) = e^{iσ(-s + xy/2)ħ + iσx√ħ v} u(v + √ħ y).

    Raises:
        RepresentationError: If ħ <= 0 or g is not in H^1
        ShiftOutOfRangeError: If √ħ|y| exceeds the grid half-extent
    """
    if hbar <= 0:
        raise RepresentationError(f"ħ must be positive, got {hbar}")
    if g.n != 1:
        raise RepresentationError(f"Wave-grid representation needs n = 1, got {g.n}")
    sigma = int(Sign(sign))
    x, y = g.x[0], g.y[0]
    root = np.sqrt(hbar)
    _check_shift(root * abs(y), grid, None, hbar)
    phase = np.exp(1j * sigma * ((-g.s + 0.5 * x * y) * hbar + x * root * grid.v))
    return WaveOp(hbar, sign, grid, phase[:, np.newaxis] * shift_matrix(root * y, grid))


def central_transform(k: PFunction, hbar: float) -> np.ndarray:
    """kt(x, y) = ∫ k(s, x, y) e^{-isħ} ds by quadrature at an arbitrary ħ."""
    weights = np.exp(-1j * hbar * k.spec.s) * k.spec.h_s
    return np.tensordot(weights, k.values, axes=(0, 0))


def mixed_transform(k: PFunction, hbar: float, q: np.ndarray, p: np.ndarray) -> np.ndarray:
    """k̂(ħ, q, p) = ∫ k e^{-isħ + i(qx + py)} dg on the outer product of q and p."""
    spec = k.spec
    kt = central_transform(k, hbar) * (spec.h_x * spec.h_y)
    Eq = np.exp(1j * np.outer(np.asarray(q), spec.x))
    Ep = np.exp(1j * np.outer(spec.y, np.asarray(p)))
    return Eq @ kt @ Ep


def rep_quantize(
    k: PFunction,
    hbar: float,
    sign: Sign,
    grid: WaveGrid,
    budget: int = QUADRATURE_BUDGET,
    threshold: Optional[float] = 0.01,
) -> WaveOp:
    """
    ρ_{σħ}(k) = ∫ k(g) ρ_{σħ}(g) dg assembled by quadrature over the group grid.

    Args:
        k: Observable
        hbar: Positive Planck parameter
        sign: Branch σ
        grid: Wave grid; WaveGrid.matched gives exact whole-step translations
        budget: Cap on N_x·N_y·N_v quadrature terms
        threshold: Tail-mass guard; None skips admission

    Returns:
        WaveOp of ρ_{σħ}(k)

    Raises:
        ShiftOutOfRangeError: If √ħ·L_y exceeds the wave grid
        QuadratureBudgetError: If the assembly exceeds the budget
    """
    if hbar <= 0:
        raise RepresentationError(f"ħ must be positive, got {hbar}")
    if threshold is not None:
        k.admit(threshold)
    spec = k.spec
    cost = spec.N_x * spec.N_y * grid.N_v
    if cost > budget:
        raise QuadratureBudgetError(f"Quadrature needs {cost} terms, budget is {budget}")
    root = np.sqrt(hbar)
    _check_shift(root * spec.L_y, grid, spec, hbar)
    sigma = int(Sign(sign))
    logger.debug(f"rep_quantize: ħ={hbar}, σ={sigma}, N_v={grid.N_v}")

    kt = central_transform(k, sigma * hbar)
    x, y, v = spec.x, spec.y, grid.v
    # d[j, i] = Σ_x kt(x, y_j) e^{iσx(ħ y_j/2 + √ħ v_i)}
    freq = sigma * (0.5 * hbar * y[:, np.newaxis] + root * v[np.newaxis, :])
    d = np.einsum("xj,xji->ji", kt, np.exp(1j * x[:, np.newaxis, np.newaxis] * freq[np.newaxis]))
    d *= spec.h_x * spec.h_y

    steps = root * y / grid.h_v
    whole = np.round(steps)
    matrix = np.zeros((grid.N_v, grid.N_v), dtype=complex)
    if np.all(np.abs(steps - whole) < SHIFT_SNAP):
        rows = np.arange(grid.N_v)
        for j, m in enumerate(whole.astype(int)):
            np.add.at(matrix, (rows, (rows + m) % grid.N_v), d[j])
    else:
        for j in range(spec.N_y):
            matrix += d[j][:, np.newaxis] * shift_matrix(root * y[j], grid)
    return WaveOp(hbar, sign, grid, matrix)


def weyl_symbol(k: PFunction, hbar: float, sign: Sign, grid: WaveGrid) -> np.ndarray:
    """
    Symbol a(v_m, ν_k) = k̂(σħ, σ√ħ v_m, √ħ ν_k) of ρ_{σħ}(k).

    Rows run over the half-step lattice, columns over grid.nu.
    """
    sigma = int(Sign(sign))
    root = np.sqrt(hbar)
    return mixed_transform(k, sigma * hbar, sigma * root * grid.half_lattice, root * grid.nu)


Symbol = Union[np.ndarray, Callable[[np.ndarray, np.ndarray], np.ndarray]]


def weyl_quantize(
    symbol: Symbol,
    hbar: float,
    cfg: WeylConfig,
    grid: WaveGrid,
    sign: Sign = Sign.PLUS,
) -> WaveOp:
    """
    τ-quantization: (a_τ u)(v) = (2π)^{-1} ∬ e^{i(v-w)ν} a((1-τ)v + τw, ν) u(w) dw dν.

    Args:
        symbol: Callable a(v, ν) on broadcast arrays, or an array of shape
            (2·N_v, N_v) on grid.half_lattice × grid.nu (then τ ∈ {0, ½, 1});
            the τ-point of v_i and v_j lies on the short arc of the periodic grid
        hbar: Planck parameter carried by the result
        cfg: Ordering parameter
        grid: Wave grid

    Returns:
        WaveOp with kernel K_ij = N_v^{-1} Σ_k e^{i(v_i - v_j)ν_k} a(τ-point, ν_k)
    """
    v, nu = grid.v, grid.nu
    N = grid.N_v
    tau = cfg.tau
    if not callable(symbol):
        symbol = np.asarray(symbol)
        if symbol.shape != (2 * N, N):
            raise RepresentationError(
                f"Symbol array must have shape {(2 * N, N)}, got {symbol.shape}"
            )
        if 2 * tau not in (0.0, 1.0, 2.0):
            raise RepresentationError("Array symbols support τ ∈ {0, ½, 1} only")
    matrix = np.empty((N, N), dtype=complex)
    cols = np.arange(N)
    for i in range(N):
        # v_j - v_i along the short arc of the periodic grid
        steps = (cols - i + N // 2) % N - N // 2
        if callable(symbol):
            point = v[i] + tau * steps * grid.h_v
            values = np.asarray(symbol(point[:, np.newaxis], nu[np.newaxis, :]), dtype=complex)
            values = np.broadcast_to(values, (N, N))
        else:
            index = (2 * i + np.rint(2 * tau * steps).astype(int)) % (2 * N)
            values = symbol[index]
        phase = np.exp(1j * (v[i] - v)[:, np.newaxis] * nu[np.newaxis, :])
        matrix[i] = np.sum(phase * values, axis=1) / N
    return WaveOp(hbar, sign, grid, matrix)


def rep_classical(k: PFunction, lattice: PhaseLattice) -> ClassicalSymbol:
    """Classical image k̂(0, q, p) = ∫ k e^{i(qx + py)} dg on the lattice."""
    return ClassicalSymbol(lattice, mixed_transform(k, 0.0, lattice.q, lattice.p))


@dataclass
class BracketImageReport:
    """Residuals of the bracket-image identities."""

    quantum: Dict[float, float] = field(default_factory=dict)
    classical: Optional[float] = None

    @property
    def worst_quantum(self) -> float:
        return max(self.quantum.values(), default=0.0)


def poisson_fallback(k1: PFunction, k2: PFunction, lattice: PhaseLattice) -> np.ndarray:
    """Poisson bracket of classical images by central differences on the lattice."""
    a = rep_classical(k1, lattice).values
    b = rep_classical(k2, lattice).values
    dq = lattice.q[1] - lattice.q[0]
    dp = lattice.p[1] - lattice.p[0]
    da_q, da_p = np.gradient(a, dq, dp, edge_order=2)
    db_q, db_p = np.gradient(b, dq, dp, edge_order=2)
    return da_q * db_p - da_p * db_q


def check_bracket_images(
    k1: PFunction,
    k2: PFunction,
    hbar_list: Sequence[float],
    grid: Optional[WaveGrid] = None,
    lattice: PhaseLattice = PhaseLattice(),
    signals: Optional[Tuple[TestSignal, TestSignal]] = None,
    sign: Sign = Sign.PLUS,
) -> BracketImageReport:
    """
    Compare images of {{k1, k2}} with (1/(iσħ))[K1, K2] and with the Poisson bracket.

    Args:
        k1, k2: Observables on a common grid
        hbar_list: Planck values for the quantum check
        grid: Wave grid; None uses WaveGrid.matched per ħ
        lattice: Classical evaluation lattice
        signals: Closed forms of k1 and k2; None uses finite differences
        sign: Representation branch

    Returns:
        BracketImageReport with one quantum residual per ħ and one classical residual
    """
    bracket = pbracket(k1, k2)
    report = BracketImageReport()
    sigma = int(Sign(sign))
    for hbar in hbar_list:
        wave = grid if grid is not None else WaveGrid.matched(k1.spec, hbar)
        K1 = rep_quantize(k1, hbar, sign, wave)
        K2 = rep_quantize(k2, hbar, sign, wave)
        expected = K1.commutator(K2) * (1.0 / (1j * sigma * hbar))
        image = rep_quantize(bracket, hbar, sign, wave, threshold=None)
        report.quantum[float(hbar)] = image.distance(expected)
        logger.debug(f"Quantum bracket residual at ħ={hbar}: {report.quantum[float(hbar)]:.3e}")

    classical = rep_classical(bracket, lattice)
    if signals is not None:
        Q, P = lattice.mesh()
        analytic = poisson_bracket(signals[0], signals[1], Q, P)
    else:
        analytic = poisson_fallback(k1, k2, lattice)
    report.classical = classical.distance(analytic)
    logger.info(
        f"Bracket images: worst quantum {report.worst_quantum:.3e}, classical {report.classical:.3e}"
    )
    return report


def correspondence_residual(
    k1: PFunction,
    k2: PFunction,
    hbar: float,
    lattice: PhaseLattice,
    poisson: np.ndarray,
    commutator: Optional[PFunction] = None,
) -> float:
    """
    Distance between the symbol (1/(iħ))ĉ(ħ, q, p) of the scaled commutator and a Poisson bracket.

    The commutator c = k1∗k2 - k2∗k1 may be passed in to reuse it across ħ.
    """
    if commutator is None:
        commutator = convolution_commutator(k1, k2)
    symbol = mixed_transform(commutator, hbar, lattice.q, lattice.p) / (1j * hbar)
    scale = np.max(np.abs(poisson))
    return float(np.max(np.abs(symbol - poisson)) / scale) if scale > 0 else float(np.max(np.abs(symbol)))


def fit_slope(hbars: Sequence[float], residuals: Sequence[float]) -> float:
    """Least-squares slope of log(residual) against log(ħ)."""
    x = np.log(np.asarray(hbars, dtype=float))
    y = np.log(np.asarray(residuals, dtype=float))
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def hermite_basis(grid: WaveGrid, count: int) -> List[np.ndarray]:
    return [grid.hermite(n) for n in range(count)]
