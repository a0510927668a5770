"""Time evolution under the p-mechanical bracket, with the harmonic oscillator as the worked case."""

from .hamiltonian import DynamicsError, HamiltonianKind, HamiltonianSpec
from .oscillator import (
    ROTATION_RATE,
    RotationFlow,
    oscillator_hamiltonian,
    oscillator_image,
    quantum_flow,
    rotate_exact,
    smeared_images,
    transport_flow,
    transport_rhs,
)
from .evolution import (
    CFLViolationError,
    ConsistencyReport,
    NumericalInstabilityError,
    SeriesNotConvergedError,
    TrajectoryState,
    check_consistency,
    evolve_conjugation,
    evolve_rk4,
    rhs,
    write_trajectory_csv,
)

__all__ = [
    "DynamicsError",
    "HamiltonianKind",
    "HamiltonianSpec",
    "ROTATION_RATE",
    "RotationFlow",
    "oscillator_hamiltonian",
    "oscillator_image",
    "quantum_flow",
    "rotate_exact",
    "smeared_images",
    "transport_flow",
    "transport_rhs",
    "CFLViolationError",
    "ConsistencyReport",
    "NumericalInstabilityError",
    "SeriesNotConvergedError",
    "TrajectoryState",
    "check_consistency",
    "evolve_conjugation",
    "evolve_rk4",
    "rhs",
    "write_trajectory_csv",
]
