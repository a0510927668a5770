"""
Harmonic oscillator on H¹.

The Hamiltonian δ(s)δ″(x)δ(y) + δ(s)δ(x)δ″(y) is kept as the field
polynomial XX + YY. Its bracket with an observable is the transport
2(x∂_y - y∂_x)f, solved exactly by rotating every s-slice.
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
import scipy.fft as sfft
from scipy.linalg import expm

from ..algebra.convolution import convolve_fast
from ..algebra.pbracket import apply_antiderivative
from ..grid.catalog import TestSignal
from ..grid.gridfn import GridSpec, PFunction, shift_interp, spectral_derivative
from ..group.heisenberg import NYQUIST_THRESHOLD, FieldPolynomial, check_resolution
from ..reps.schrodinger import (
    ClassicalSymbol,
    PhaseLattice,
    Sign,
    WaveGrid,
    WaveOp,
    rep_classical,
    rep_quantize,
)
from .hamiltonian import DynamicsError, HamiltonianSpec

logger = logging.getLogger(__name__)

# transport_flow(f0, t) = rotate_exact(f0, ROTATION_RATE * t)
ROTATION_RATE = -2.0
SMEAR_WIDTHS = (0.2, 0.1, 0.05)
SMEAR_POINTS = 32


def oscillator_hamiltonian(scale: float = 1.0) -> HamiltonianSpec:
    """δ″-Hamiltonian c·(XX + YY) as a differential Hamiltonian."""
    return HamiltonianSpec.from_polynomial(
        FieldPolynomial.from_mapping({"XX": scale, "YY": scale})
    )


def transport_rhs(
    f: PFunction,
    scale: float = 1.0,
    check: bool = True,
    threshold: float = NYQUIST_THRESHOLD,
) -> PFunction:
    """
    2c(x ∂_y - y ∂_x)f by spectral derivatives.

    Raises:
        GridTooCoarseError: If f is not resolved in x or y
    """
    if check:
        check_resolution(f, (1, 2), threshold)
    spec = f.spec
    x = spec.x[np.newaxis, :, np.newaxis]
    y = spec.y[np.newaxis, np.newaxis, :]
    dx = spectral_derivative(f.values, 1, spec.h_x)
    dy = spectral_derivative(f.values, 2, spec.h_y)
    return f.with_values(2.0 * scale * (x * dy - y * dx))


def field_bracket(f: PFunction, polynomial: FieldPolynomial) -> PFunction:
    """{{f, Pδ}} = 𝒜(f∗Pδ - Pδ∗f) through left and right invariant fields."""
    difference = polynomial.right_convolve(f) - polynomial.left_convolve(f)
    return apply_antiderivative(difference)


@dataclass(frozen=True)
class RotationFlow:
    """(x, y) ↦ (x cos t + y sin t, -x sin t + y cos t)."""

    t: float

    @property
    def matrix(self) -> np.ndarray:
        c, s = np.cos(self.t), np.sin(self.t)
        return np.array([[c, s], [-s, c]])

    def apply(self, x, y) -> Tuple[np.ndarray, np.ndarray]:
        c, s = np.cos(self.t), np.sin(self.t)
        return x * c + y * s, -x * s + y * c

    def then(self, other: "RotationFlow") -> "RotationFlow":
        return RotationFlow(self.t + other.t)

    def __call__(self, f: PFunction) -> PFunction:
        return rotate_exact(f, self.t)


def _require_square(spec: GridSpec) -> None:
    if spec.L_x != spec.L_y or spec.N_x != spec.N_y:
        raise DynamicsError(
            f"Rotation needs identical x and y axes, got L=({spec.L_x}, {spec.L_y}), "
            f"N=({spec.N_x}, {spec.N_y})"
        )


def _quarter_turns(values: np.ndarray, turns: int) -> np.ndarray:
    # g(x, y) = f(y, -x); -x_i = x_{N-i} on the periodic grid
    n = values.shape[1]
    negate = (-np.arange(n)) % n
    for _ in range(turns % 4):
        values = np.swapaxes(values, 1, 2)[:, negate, :]
    return values


def rotate_exact(f0: PFunction, t: float) -> PFunction:
    """
    f0(s, x cos t + y sin t, -x sin t + y cos t) on every s-slice.

    Whole quarter turns are index permutations; the remaining angle r,
    |r| <= π/4, is three spectral shears with tan(r/2) and -sin(r).

    Raises:
        DynamicsError: If the x and y axes differ
    """
    spec = f0.spec
    _require_square(spec)
    turns = int(np.round(t / (0.5 * np.pi)))
    r = t - turns * 0.5 * np.pi
    values = _quarter_turns(f0.values, turns)
    if r != 0.0:
        a, b = np.tan(0.5 * r), -np.sin(r)
        values = shift_interp(values, a * spec.y, spec.h_x, axis=1)
        values = shift_interp(values, b * spec.x, spec.h_y, axis=2)
        values = shift_interp(values, a * spec.y, spec.h_x, axis=1)
    return f0.with_values(values)


def transport_flow(f0: PFunction, t: float, scale: float = 1.0) -> PFunction:
    """Exact solution of df/dt = 2c(x ∂_y - y ∂_x)f."""
    return rotate_exact(f0, ROTATION_RATE * scale * t)


def rotated_symbol(signal: TestSignal, angle: float, lattice: PhaseLattice) -> np.ndarray:
    """Closed-form classical image of rotate_exact(signal, angle): the symbol at rotated (q, p)."""
    Q, P = lattice.mesh()
    q, p = RotationFlow(angle).apply(Q, P)
    return signal.classical(q, p)


def number_operator_matrix(grid: WaveGrid) -> np.ndarray:
    """M² + D² on the wave grid with D² = -d²/dv² applied spectrally."""
    nu = grid.nu
    identity = np.eye(grid.N_v)
    d2 = sfft.ifft(nu[:, np.newaxis] ** 2 * sfft.fft(identity, axis=0), axis=0)
    return np.diag(grid.v ** 2).astype(complex) + d2


def oscillator_image(hbar: float, grid: WaveGrid, scale: float = 1.0, sign: Sign = Sign.PLUS) -> WaveOp:
    """ρ_ħ of c(XX + YY)δ: -cħ(M² + D²) on either branch."""
    return WaveOp(hbar, sign, grid, -scale * hbar * number_operator_matrix(grid))


def oscillator_symbol(lattice: PhaseLattice, scale: float = 1.0) -> np.ndarray:
    """Classical image -c(q² + p²)."""
    Q, P = lattice.mesh()
    return -scale * (Q ** 2 + P ** 2)


def quantum_flow(K0: WaveOp, t: float, scale: float = 1.0) -> WaveOp:
    """
    Heisenberg evolution K(t) = U* K0 U, U = exp(iσct(M² + D²)).

    Solves dK/dt = (1/(iσħ))[K, -cħ(M² + D²)] with a scaling-and-squaring exponential.
    """
    A = number_operator_matrix(K0.grid)
    U = expm(1j * int(K0.sign) * scale * t * A)
    return WaveOp(K0.hbar, K0.sign, K0.grid, U.conj().T @ K0.matrix @ U)


def smeared_kernel(eps: float, n: int = SMEAR_POINTS) -> PFunction:
    """
    Smeared δ″ Hamiltonian [γ″(x)γ(y) + γ(x)γ″(y)]γ(s) with γ of width ε.

    Sampled on the cube of half-extent 6ε.
    """
    spec = GridSpec.cube(6.0 * eps, n)

    def gamma(t):
        return np.exp(-0.5 * t * t / eps ** 2) / (np.sqrt(2.0 * np.pi) * eps)

    def gamma2(t):
        return (t * t / eps ** 4 - 1.0 / eps ** 2) * gamma(t)

    return PFunction.from_callable(
        spec, lambda s, x, y: (gamma2(x) * gamma(y) + gamma(x) * gamma2(y)) * gamma(s)
    ).admit()


def richardson(samples: Sequence[np.ndarray]) -> np.ndarray:
    """Extrapolate values known at ε, ε/2, ε/4, ... with even error expansions to ε = 0."""
    table: List[np.ndarray] = [np.asarray(v) for v in samples]
    for j in range(1, len(table)):
        factor = 4.0 ** j
        table = [
            table[i + 1] + (table[i + 1] - table[i]) / (factor - 1.0)
            for i in range(len(table) - 1)
        ]
    return table[0]


def smeared_images(
    hbar: float,
    grid: WaveGrid,
    lattice: PhaseLattice,
    widths: Sequence[float] = SMEAR_WIDTHS,
) -> Tuple[WaveOp, ClassicalSymbol]:
    """
    Images of the δ″ Hamiltonian from smeared kernels, extrapolated in ε.

    Args:
        hbar: Planck parameter of the quantum image
        grid: Wave grid; translations are spectral, so any grid with
            h_v >= √ħ·h_y of the smeared grids works
        lattice: Classical evaluation lattice
        widths: Halving sequence of smearing widths

    Returns:
        (extrapolated ρ_ħ image, extrapolated classical image)
    """
    quantum, classical = [], []
    for eps in widths:
        k = smeared_kernel(eps)
        quantum.append(rep_quantize(k, hbar, Sign.PLUS, grid).matrix)
        classical.append(rep_classical(k, lattice).values)
        logger.debug(f"Smeared Hamiltonian images at ε={eps}")
    return (
        WaveOp(hbar, Sign.PLUS, grid, richardson(quantum)),
        ClassicalSymbol(lattice, richardson(classical)),
    )


def hermite_residual(image: WaveOp, reference: WaveOp, levels: int = 4) -> float:
    """Largest relative error of image·ψ_n against reference·ψ_n for n < levels."""
    worst = 0.0
    for n in range(levels):
        psi = image.grid.hermite(n)
        expected = reference.matrix @ psi
        error = np.linalg.norm(image.matrix @ psi - expected) / np.linalg.norm(expected)
        worst = max(worst, float(error))
    return worst


def side_identity_residuals(
    g: PFunction,
    f: PFunction,
    polynomial: FieldPolynomial,
) -> Tuple[float, float]:
    """
    Check (g∗Pδ)∗f = g∗(Pδ∗f) with both sides computed through invariant fields.

    Returns:
        (residual of the identity, mismatch when the left factor uses the wrong side)
    """
    rhs = convolve_fast(g, polynomial.left_convolve(f))
    lhs = convolve_fast(polynomial.right_convolve(g), f)
    wrong = convolve_fast(polynomial.left_convolve(g), f)
    return lhs.distance(rhs), wrong.distance(rhs)
