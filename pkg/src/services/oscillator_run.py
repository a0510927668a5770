"""Oscillator run: integrate the observable flow and cross-check it against its images."""

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional

from ..config import ConfigError, RunConfig
from ..dynamics.evolution import (
    MIN_CONSISTENCY_SNAPSHOTS,
    ConsistencyReport,
    Trajectory,
    check_consistency,
    evolve_rk4,
    write_trajectory_csv,
)
from ..dynamics.oscillator import oscillator_hamiltonian, quantum_flow, transport_flow
from ..grid.catalog import get_signal
from ..grid.gridfn import sample
from ..reps.schrodinger import Sign, rep_quantize
from .verifier import REP_HBARS, CheckResult, VerificationReport, measure

logger = logging.getLogger(__name__)

DEFAULT_T_END = math.pi
DEFAULT_DT = math.pi / 400
CONSISTENCY_HBAR = 1.0


@dataclass
class OscillatorResult:
    """Outcome of one oscillator run."""

    trajectory: Trajectory
    rows: List[Dict[str, Optional[float]]]
    consistency: ConsistencyReport
    report: VerificationReport
    files: Dict[str, Path] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.report.passed


def _is_period(t: float) -> bool:
    turns = t / math.pi
    return round(turns) >= 1 and abs(turns - round(turns)) < 1e-9


def _uniform_prefix(traj: Trajectory) -> Trajectory:
    """Drop a short final step left over when the step count is not a multiple of the stride."""
    if len(traj) < 3:
        return traj
    first = traj[1].t - traj[0].t
    last = traj[-1].t - traj[-2].t
    return traj if math.isclose(first, last, rel_tol=1e-9) else traj[:-1]


class OscillatorService:
    """
    Evolves the first catalog observable under the oscillator Hamiltonian.

    The RK4 trajectory is compared with the exact rotation, with the
    Heisenberg and Hamilton equations of its images, and with the period
    of the quantum flow.
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self.tol = config.tolerances
        self.hamiltonian = oscillator_hamiltonian()
        logger.info("OscillatorService initialized")

    def initial_observable(self):
        return sample(get_signal(self.config.catalog[0]), self.config.grid)

    def run(
        self,
        t_end: float = DEFAULT_T_END,
        dt: float = DEFAULT_DT,
        on_step: Optional[Callable[[int, int], None]] = None,
    ) -> OscillatorResult:
        """
        Integrate to t_end and measure every oscillator residual.

        Args:
            t_end: Final time, non-negative
            dt: Requested RK4 step
            on_step: Progress callback (step, total)

        Returns:
            OscillatorResult with per-snapshot rows and the check report

        Raises:
            ConfigError: If t_end is negative or dt is not positive
            NumericalInstabilityError: If the integration blows up
        """
        if t_end < 0 or dt <= 0:
            raise ConfigError(
                f"t_end must be non-negative and dt positive, got t_end={t_end}, dt={dt}"
            )

        f0 = self.initial_observable()
        logger.info(f"Oscillator run: f0={self.config.catalog[0]}, t_end={t_end:.4f}, dt={dt:.2e}")
        traj = evolve_rk4(f0, self.hamiltonian, t_end, dt, self.config.snapshots, on_step)

        rows = []
        for state in traj:
            rows.append({
                "t": state.t,
                "l2_norm": state.f.norm(),
                "transport_residual": state.f.distance(transport_flow(f0, state.t)),
                "recurrence_residual": state.f.distance(f0) if _is_period(state.t) else None,
            })

        results = [
            CheckResult("oscillator_transport", max(r["transport_residual"] for r in rows),
                        self.tol.oscillator_transport),
            measure("oscillator_period", lambda: self._period_residual(f0), self.tol.oscillator_period),
        ]

        uniform = _uniform_prefix(traj)
        if len(uniform) >= MIN_CONSISTENCY_SNAPSHOTS:
            consistency = check_consistency(
                uniform, self.hamiltonian, CONSISTENCY_HBAR,
                self.config.fixed_wave_grid,
                self.config.lattice,
            )
            for offset, i in enumerate(range(2, len(uniform) - 2)):
                rows[i]["heisenberg_residual"] = consistency.per_snapshot["heisenberg_residual"][offset]
                rows[i]["hamilton_residual"] = consistency.per_snapshot["hamilton_residual"][offset]
            results += [
                CheckResult("oscillator_heisenberg", consistency.heisenberg, self.tol.oscillator_heisenberg),
                CheckResult("oscillator_hamilton", consistency.hamilton, self.tol.oscillator_hamilton),
                CheckResult("oscillator_alternative", consistency.alternative, self.tol.oscillator_alternative),
            ]
        else:
            logger.info(
                f"{len(uniform)} evenly spaced snapshots, fewer than {MIN_CONSISTENCY_SNAPSHOTS}; "
                "consistency checks not applicable"
            )
            consistency = ConsistencyReport.not_applicable()
        recurrences = [r["recurrence_residual"] for r in rows if r["recurrence_residual"] is not None]
        if recurrences:
            results.append(
                CheckResult("oscillator_recurrence", max(recurrences), self.tol.oscillator_recurrence)
            )
        else:
            logger.info("Run shorter than one period; recurrence not checked")

        return OscillatorResult(traj, rows, consistency, VerificationReport(results))

    def _period_residual(self, f0) -> float:
        worst = 0.0
        for hbar in REP_HBARS:
            K0 = rep_quantize(f0, hbar, Sign.PLUS, self.config.wave_grid(hbar))
            worst = max(worst, quantum_flow(K0, math.pi).distance(K0))
        return worst

    def write(self, result: OscillatorResult, directory: Path, timings: bool = True) -> Dict[str, Path]:
        """Write trajectory.csv and report.json into directory."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        csv_path = write_trajectory_csv(directory / "trajectory.csv", result.rows)
        summary = {
            "catalog": self.config.catalog[0],
            "consistency_hbar": CONSISTENCY_HBAR,
            "snapshots": len(result.trajectory),
            "t_end": result.trajectory[-1].t,
            "checks": [r.to_dict(timings) for r in result.report.results],
            "consistency": result.consistency.as_dict(),
        }
        report_path = directory / "report.json"
        report_path.write_text(json.dumps(summary, sort_keys=True, indent=2) + "\n")
        result.files = {"trajectory": csv_path, "report": report_path}
        logger.info(f"Oscillator results written to {directory}")
        return result.files
