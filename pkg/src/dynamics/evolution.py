"""The p-mechanical equation of motion df/dt = {{f, H}}: solvers and consistency checks."""

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..algebra.convolution import convolve_fast
from ..algebra.pbracket import apply_antiderivative, pbracket
from ..grid.gridfn import PFunction, spectral_derivative
from ..grid.io import save_pfunction
from ..reps.schrodinger import (
    PhaseLattice,
    Sign,
    WaveGrid,
    mixed_transform,
    operator_norm,
    rep_quantize,
)
from .hamiltonian import DynamicsError, HamiltonianSpec
from .oscillator import field_bracket, oscillator_image, transport_rhs

logger = logging.getLogger(__name__)

DEFAULT_SNAPSHOTS = 50
GROWTH_LIMIT = 10.0
CFL_NUMBER = 0.5
MAX_SERIES_ORDER = 20
MIN_CONSISTENCY_SNAPSHOTS = 5
SERIES_TOL = 1e-13

TRAJECTORY_COLUMNS = (
    "t",
    "l2_norm",
    "transport_residual",
    "heisenberg_residual",
    "hamilton_residual",
    "recurrence_residual",
)


class NumericalInstabilityError(DynamicsError):
    """The integrated observable grew beyond the instability limit."""
    pass


class SeriesNotConvergedError(DynamicsError):
    """A convolution exponential did not converge within the order cap."""
    pass


class CFLViolationError(DynamicsError):
    """Time step too large for the advection speed of a differential Hamiltonian."""
    pass


@dataclass(frozen=True, eq=False)
class TrajectoryState:
    """Observable f at time t."""

    t: float
    f: PFunction


Trajectory = List[TrajectoryState]


def rhs(f: PFunction, H: HamiltonianSpec) -> PFunction:
    """
    Right-hand side {{f, H}} of the equation of motion.

    Kernel Hamiltonians go through the p-mechanical bracket; differential
    ones through invariant fields, with c(XX + YY) reduced to transport.
    """
    if H.is_kernel:
        return pbracket(f, H.kernel)
    scale = H.oscillator_scale
    if scale is not None:
        return transport_rhs(f, scale)
    return field_bracket(f, H.polynomial)


def max_stable_step(f0: PFunction, H: HamiltonianSpec) -> float:
    """CFL bound 0.5·h/speed for differential Hamiltonians, infinity otherwise."""
    speed = H.advection_speed(f0.spec)
    if speed == 0.0:
        return math.inf
    h = min(f0.spec.h_x, f0.spec.h_y)
    return CFL_NUMBER * h / speed


def evolve_rk4(
    f0: PFunction,
    H: HamiltonianSpec,
    t_end: float,
    dt: float,
    snapshots: int = DEFAULT_SNAPSHOTS,
    on_step: Optional[Callable[[int, int], None]] = None,
) -> Trajectory:
    """
    Classical fourth-order Runge-Kutta integration.

    Args:
        f0: Initial observable
        H: Hamiltonian
        t_end: Final time, >= 0
        dt: Requested step; the step is shrunk so that t_end is hit exactly
        snapshots: Number of evenly spaced snapshots after the initial one
        on_step: Optional progress callback (step, total)

    Returns:
        Snapshots, starting with (0, f0) and ending at t_end

    Raises:
        CFLViolationError: If dt exceeds the CFL bound of a differential Hamiltonian
        NumericalInstabilityError: If the L2 norm grows more than tenfold
    """
    if dt <= 0:
        raise DynamicsError(f"dt must be positive, got {dt}")
    if t_end < 0:
        raise DynamicsError(f"t_end must be non-negative, got {t_end}")
    f0.admit()
    limit = max_stable_step(f0, H)
    if dt > limit:
        logger.error(f"dt={dt:.3e} exceeds the CFL bound {limit:.3e}")
        raise CFLViolationError(f"dt={dt:.3e} exceeds the CFL bound {limit:.3e}")

    trajectory: Trajectory = [TrajectoryState(0.0, f0)]
    if t_end == 0.0:
        return trajectory

    steps = max(1, math.ceil(t_end / dt - 1e-9))
    h = t_end / steps
    every = max(1, steps // max(1, snapshots))
    norm0 = f0.norm()
    logger.info(f"RK4: {steps} steps of {h:.3e} to t={t_end:.4f}")

    f = f0
    for n in range(1, steps + 1):
        k1 = rhs(f, H)
        k2 = rhs(f + (0.5 * h) * k1, H)
        k3 = rhs(f + (0.5 * h) * k2, H)
        k4 = rhs(f + h * k3, H)
        f = f + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

        norm = f.norm()
        if norm0 > 0 and norm > GROWTH_LIMIT * norm0:
            logger.error(f"Norm grew from {norm0:.3e} to {norm:.3e} at step {n}")
            raise NumericalInstabilityError(
                f"L2 norm grew {norm / norm0:.1f}x by t={n * h:.4f}; reduce dt"
            )
        if n % every == 0 or n == steps:
            trajectory.append(TrajectoryState(n * h, f))
        if on_step is not None:
            on_step(n, steps)
    return trajectory


def _series(G: PFunction, t: float, scale: float) -> PFunction:
    """Σ_{m>=1} (scale·t)^m G^{∗m}/m!, truncated when the terms fall below tolerance."""
    term = G * (scale * t)
    total = term
    first = term.l1_norm()
    if first == 0.0:
        return total
    power_norm = G.l1_norm()
    for m in range(2, MAX_SERIES_ORDER + 1):
        term = convolve_fast(term, G, threshold=None) * (scale * t / m)
        total = total + term
        size = term.l1_norm()
        if size <= SERIES_TOL * first:
            logger.debug(f"Convolution exponential converged at order {m}")
            return total
        power_norm = size * math.factorial(m) / abs(t) ** m
    radius = power_norm ** (1.0 / MAX_SERIES_ORDER)
    logger.error(f"Convolution exponential did not converge; radius estimate {radius:.3e}")
    raise SeriesNotConvergedError(
        f"Series not converged at order {MAX_SERIES_ORDER} "
        f"(spectral radius estimate {radius:.3e}, t={t})"
    )


def evolve_conjugation(f0: PFunction, H: HamiltonianSpec, t: float) -> PFunction:
    """
    f(t) = exp(-t𝒜H) ∗ f0 ∗ exp(t𝒜H) with truncated convolution exponentials.

    Raises:
        DynamicsError: If H is not a kernel
        NotInL1vError: If H has nonzero s-means, so 𝒜H is undefined
        SeriesNotConvergedError: If an exponential needs more than 20 terms
    """
    if not H.is_kernel:
        raise DynamicsError("evolve_conjugation needs a convolution-kernel Hamiltonian")
    if t == 0.0:
        return f0
    G = apply_antiderivative(H.kernel)
    left = _series(G, t, -1.0)
    right = _series(G, t, 1.0)
    f0_right = convolve_fast(f0, right, threshold=None)
    return (
        f0
        + convolve_fast(left, f0, threshold=None)
        + f0_right
        + convolve_fast(left, f0_right, threshold=None)
    )


def time_derivative(values: Sequence, times: Sequence[float], index: int):
    """Centered difference at a snapshot: five points where available, else three."""
    n = len(values)
    dt = times[index + 1] - times[index] if index + 1 < n else times[index] - times[index - 1]
    if 2 <= index <= n - 3:
        return (
            -values[index + 2] + 8.0 * values[index + 1] - 8.0 * values[index - 1] + values[index - 2]
        ) * (1.0 / (12.0 * dt))
    if 1 <= index <= n - 2:
        return (values[index + 1] - values[index - 1]) * (1.0 / (2.0 * dt))
    raise DynamicsError("Centered differences need a snapshot on each side")


def _interior(traj: Trajectory) -> range:
    if len(traj) < MIN_CONSISTENCY_SNAPSHOTS:
        raise DynamicsError(
            f"Consistency checks need at least {MIN_CONSISTENCY_SNAPSHOTS} snapshots, got {len(traj)}"
        )
    return range(2, len(traj) - 2)


def _uniform(traj: Trajectory) -> None:
    steps = np.diff([s.t for s in traj])
    if not np.allclose(steps, steps[0], rtol=1e-9):
        raise DynamicsError("Consistency checks need evenly spaced snapshots")


@dataclass
class ConsistencyReport:
    """
    Worst residuals along a trajectory, plus per-snapshot columns.

    A trajectory too short for centered differences gets a report with
    applicable = False and no residuals.
    """

    heisenberg: Optional[float] = 0.0
    hamilton: Optional[float] = 0.0
    alternative: Optional[float] = 0.0
    conservation: Optional[float] = None
    per_snapshot: Dict[str, List[float]] = field(default_factory=dict)
    applicable: bool = True

    @classmethod
    def not_applicable(cls) -> "ConsistencyReport":
        return cls(heisenberg=None, hamilton=None, alternative=None, applicable=False)

    def as_dict(self) -> Dict[str, Union[bool, float, None]]:
        return {
            "applicable": self.applicable,
            "heisenberg_residual": self.heisenberg,
            "hamilton_residual": self.hamilton,
            "alternative_residual": self.alternative,
            "conservation_residual": self.conservation,
        }


def _hamiltonian_image(H: HamiltonianSpec, hbar: float, grid: WaveGrid):
    if H.is_kernel:
        return rep_quantize(H.kernel, hbar, Sign.PLUS, grid)
    scale = H.oscillator_scale
    if scale is None:
        raise DynamicsError("Quantum images are implemented for kernels and c(XX + YY)")
    return oscillator_image(hbar, grid, scale)


def _hamilton_rhs(f: PFunction, H: HamiltonianSpec, lattice: PhaseLattice) -> np.ndarray:
    """{c, H₀} on the lattice with ∂_q c and ∂_p c taken by exact quadrature."""
    spec = f.spec
    q, p = lattice.q, lattice.p
    x = spec.x[np.newaxis, :, np.newaxis]
    y = spec.y[np.newaxis, np.newaxis, :]
    dq = mixed_transform(f.with_values(1j * x * f.values), 0.0, q, p)
    dp = mixed_transform(f.with_values(1j * y * f.values), 0.0, q, p)
    Q, P = lattice.mesh()
    if H.is_kernel:
        k = H.kernel
        hq = mixed_transform(k.with_values(1j * x * k.values), 0.0, q, p)
        hp = mixed_transform(k.with_values(1j * y * k.values), 0.0, q, p)
        return dq * hp - dp * hq
    scale = H.oscillator_scale
    if scale is None:
        raise DynamicsError("Classical images are implemented for kernels and c(XX + YY)")
    # H₀ = -c(q² + p²)
    return dq * (-2.0 * scale * P) - dp * (-2.0 * scale * Q)


def _side_difference(f: PFunction, H: HamiltonianSpec) -> PFunction:
    """f∗H - H∗f."""
    if H.is_kernel:
        return convolve_fast(f, H.kernel) - convolve_fast(H.kernel, f)
    return H.polynomial.right_convolve(f) - H.polynomial.left_convolve(f)


def _relative(error: float, scale: float) -> float:
    return float(error / scale) if scale > 0 else float(error)


def check_consistency(
    traj: Trajectory,
    H: HamiltonianSpec,
    hbar: float,
    grid: Optional[WaveGrid],
    lattice: PhaseLattice,
) -> ConsistencyReport:
    """
    Check that the images of a trajectory obey the Heisenberg and Hamilton equations.

    Time derivatives are centered differences over the snapshots. The
    alternative form ∂_s(df/dt) = f∗H - H∗f is checked as well, and for
    kernel Hamiltonians the conservation of H along its own flow.

    Args:
        traj: Evenly spaced snapshots, at least MIN_CONSISTENCY_SNAPSHOTS
        H: Hamiltonian of the trajectory
        hbar: Planck parameter of the quantum image
        grid: Wave grid; None uses WaveGrid.matched
        lattice: Classical evaluation lattice
    """
    _uniform(traj)
    indices = _interior(traj)
    spec = traj[0].f.spec
    grid = grid if grid is not None else WaveGrid.matched(spec, hbar)
    times = [s.t for s in traj]

    H_image = _hamiltonian_image(H, hbar, grid)
    operators = [rep_quantize(s.f, hbar, Sign.PLUS, grid, threshold=None) for s in traj]
    symbols = [mixed_transform(s.f, 0.0, lattice.q, lattice.p) for s in traj]

    report = ConsistencyReport()
    columns: Dict[str, List[float]] = {"heisenberg_residual": [], "hamilton_residual": [], "alternative_residual": []}
    for i in indices:
        dK = time_derivative([K.matrix for K in operators], times, i)
        expected = operators[i].commutator(H_image).matrix / (1j * hbar)
        heis = _relative(operator_norm(dK - expected), operator_norm(expected))

        dc = time_derivative(symbols, times, i)
        flow = _hamilton_rhs(traj[i].f, H, lattice)
        ham = _relative(np.max(np.abs(dc - flow)), np.max(np.abs(flow)))

        df = time_derivative([s.f.values for s in traj], times, i)
        ds_df = spectral_derivative(df, 0, spec.h_s)
        sides = _side_difference(traj[i].f, H).values
        alt = _relative(np.linalg.norm(ds_df - sides), np.linalg.norm(sides))

        columns["heisenberg_residual"].append(heis)
        columns["hamilton_residual"].append(ham)
        columns["alternative_residual"].append(alt)

    report.heisenberg = max(columns["heisenberg_residual"])
    report.hamilton = max(columns["hamilton_residual"])
    report.alternative = max(columns["alternative_residual"])
    report.per_snapshot = columns

    if H.is_kernel:
        evolved = evolve_rk4(H.kernel, H, times[-1], times[1] - times[0], snapshots=1)[-1].f
        report.conservation = evolved.distance(H.kernel)
    logger.info(
        f"Consistency: Heisenberg {report.heisenberg:.2e}, Hamilton {report.hamilton:.2e}, "
        f"alternative {report.alternative:.2e}"
    )
    return report


def linearity_residual(a: Trajectory, b: Trajectory, c: Trajectory) -> float:
    """Worst relative distance of C(t) from A(t) + B(t) over matching snapshots."""
    if not len(a) == len(b) == len(c):
        raise DynamicsError("Trajectories must have the same snapshots")
    return max(sc.f.distance(sa.f + sb.f) for sa, sb, sc in zip(a, b, c))


def product_residual(
    flow: Callable[[PFunction, float], PFunction],
    a0: PFunction,
    b0: PFunction,
    times: Sequence[float],
) -> float:
    """Worst distance of flow(a0∗b0, t) from flow(a0, t)∗flow(b0, t)."""
    c0 = convolve_fast(a0, b0)
    worst = 0.0
    for t in times:
        lhs = flow(c0, t)
        rhs_ = convolve_fast(flow(a0, t), flow(b0, t))
        worst = max(worst, lhs.distance(rhs_))
    return worst


def bracket_flow_residual(
    flow: Callable[[PFunction, float], PFunction],
    a0: PFunction,
    b0: PFunction,
    times: Sequence[float],
) -> float:
    """Worst distance of {{flow(a0), flow(b0)}} from flow({{a0, b0}})."""
    c0 = pbracket(a0, b0)
    worst = 0.0
    for t in times:
        lhs = pbracket(flow(a0, t), flow(b0, t))
        worst = max(worst, lhs.distance(flow(c0, t)))
    return worst


def write_trajectory_csv(
    path: Union[str, Path],
    rows: Sequence[Dict[str, float]],
    columns: Tuple[str, ...] = TRAJECTORY_COLUMNS,
) -> Path:
    """Write trajectory rows; missing values are left empty."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(columns), extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if row.get(k) is None else repr(float(row[k]))) for k in columns})
    logger.debug(f"Wrote {len(rows)} trajectory rows to {path}")
    return path


def save_snapshots(traj: Trajectory, directory: Union[str, Path]) -> List[Path]:
    """Write every snapshot as a PFunction binary named by its index."""
    directory = Path(directory)
    return [save_pfunction(s.f, directory / f"snapshot_{i:04d}.bin") for i, s in enumerate(traj)]
