"""Correspondence sweep: the quantum bracket's symbol against the Poisson bracket as ħ shrinks."""

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from ..algebra.convolution import commutator
from ..config import ConfigError, RunConfig
from ..grid.catalog import get_signal, poisson_bracket
from ..grid.gridfn import GridSpec, sample
from ..reps.schrodinger import correspondence_residual, fit_slope
from .verifier import CheckResult

logger = logging.getLogger(__name__)

# Wide enough that the commutator's s and x-y tails vanish before the boundary
CORRESPONDENCE_GRID = GridSpec(6.0, 6.0, 6.0, 64, 64, 64)
MIN_POINTS = 4
EXPECTED_ORDER = 2.0
VANISHING = 1e-12


@dataclass
class CorrespondenceResult:
    """Residual per ħ and the fitted convergence order."""

    hbars: List[float]
    residuals: List[float]
    slope: Optional[float]
    check: Optional[CheckResult]
    files: Dict[str, Path] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.check is None or self.check.passed


class CorrespondenceService:
    """Measures how fast (1/(iħ))[K1, K2] approaches the Poisson bracket of the symbols."""

    def __init__(self, config: RunConfig, grid: GridSpec = CORRESPONDENCE_GRID):
        self.config = config
        self.grid = grid
        logger.info("CorrespondenceService initialized")

    def _validate(self, hbars: List[float]) -> None:
        if len(hbars) < MIN_POINTS:
            raise ConfigError(
                f"A slope fit needs at least {MIN_POINTS} ħ values, got {len(hbars)}"
            )
        if any(b >= a for a, b in zip(hbars, hbars[1:])):
            raise ConfigError(f"ħ values must be strictly decreasing, got {hbars}")

    def run(self, names: Optional[List[str]] = None) -> CorrespondenceResult:
        """
        Sweep the configured ħ list for a pair of catalog signals.

        Args:
            names: Two catalog names; defaults to the first two of the configured catalog

        Returns:
            CorrespondenceResult; when both brackets vanish the slope is None and no check is made

        Raises:
            ConfigError: If the ħ list cannot support a slope fit
        """
        hbars = list(self.config.hbar_list)
        self._validate(hbars)
        first, second = names or self.config.catalog[:2]
        t1, t2 = get_signal(first), get_signal(second)
        k1, k2 = sample(t1, self.grid), sample(t2, self.grid)
        lattice = self.config.lattice
        Q, P = lattice.mesh()
        poisson = poisson_bracket(t1, t2, Q, P)
        c = commutator(k1, k2)

        residuals = []
        for hbar in hbars:
            residual = correspondence_residual(k1, k2, hbar, lattice, poisson, commutator=c)
            logger.debug(f"Correspondence residual at ħ={hbar}: {residual:.3e}")
            residuals.append(residual)

        if max(residuals) < VANISHING:
            logger.info(f"Brackets of {first} and {second} vanish; no order to fit")
            return CorrespondenceResult(hbars, residuals, None, None)

        slope = fit_slope(hbars, residuals)
        check = CheckResult(
            "correspondence_slope", abs(slope - EXPECTED_ORDER), self.config.tolerances.correspondence_slope
        )
        logger.info(f"Correspondence slope {slope:.3f} over ħ in {hbars}")
        return CorrespondenceResult(hbars, residuals, slope, check)

    def write(self, result: CorrespondenceResult, directory: Path, timings: bool = True) -> Dict[str, Path]:
        """Write correspondence.csv (hbar, residual) and report.json."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        csv_path = directory / "correspondence.csv"
        with open(csv_path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["hbar", "residual"])
            for hbar, residual in zip(result.hbars, result.residuals):
                writer.writerow([repr(float(hbar)), repr(float(residual))])
        summary = {
            "hbar": result.hbars,
            "residual": [float(r) for r in result.residuals],
            "slope": result.slope,
            "checks": [] if result.check is None else [result.check.to_dict(timings)],
        }
        report_path = directory / "report.json"
        report_path.write_text(json.dumps(summary, sort_keys=True, indent=2) + "\n")
        result.files = {"csv": csv_path, "report": report_path}
        logger.info(f"Correspondence results written to {directory}")
        return result.files
