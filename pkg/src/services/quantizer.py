"""Quantize a catalog observable by both construction paths and export the operators."""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Tuple

from ..config import RunConfig
from ..grid.catalog import get_signal
from ..grid.gridfn import sample
from ..reps.export import save_waveop
from ..reps.schrodinger import (
    RepresentationError,
    ShiftOutOfRangeError,
    Sign,
    WaveOp,
    WeylConfig,
    rep_quantize,
    weyl_quantize,
    weyl_symbol,
)
from .verifier import CheckResult

logger = logging.getLogger(__name__)


@dataclass
class QuantizationResult:
    """Both images of one observable and their mutual residual."""

    signal: str
    hbar: float
    admissible: Tuple[float, float]
    rep: WaveOp
    weyl: WaveOp
    check: CheckResult
    files: Dict[str, Path] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.check.passed


class QuantizerService:
    """
    Builds ρ_ħ(k) by group quadrature and by τ-quantization of its symbol.

    The wave grid is the configured one, or the grid matched to ħ.
    """

    def __init__(self, config: RunConfig, weyl: Optional[WeylConfig] = None):
        self.config = config
        self.weyl = weyl or WeylConfig()
        logger.info("QuantizerService initialized")

    def quantize(self, name: str, hbar: Optional[float] = None, sign: Sign = Sign.PLUS) -> QuantizationResult:
        """
        Quantize a catalog signal along both paths.

        Args:
            name: Catalog signal name
            hbar: Planck parameter; defaults to the configured quantize_hbar
            sign: Representation branch

        Returns:
            QuantizationResult with both operators

        Raises:
            CatalogError: If the signal is unknown
            RepresentationError: If ħ is not positive
            ShiftOutOfRangeError: If ħ is outside the admissible range of the grids
        """
        hbar = self.config.quantize_hbar if hbar is None else hbar
        if not hbar > 0:
            raise RepresentationError(f"ħ must be positive, got {hbar}")
        signal = get_signal(name)
        grid = self.config.wave_grid(hbar)
        lower, upper = grid.admissible_hbar(self.config.grid)
        if hbar > upper * (1.0 + 1e-12):
            message = (
                f"ħ = {hbar} is outside the admissible range ({lower:g}, {upper:.4g}] "
                f"of the wave grid (L_v={grid.L_v:.3f}, N_v={grid.N_v})"
            )
            logger.error(message)
            raise ShiftOutOfRangeError(message)

        k = sample(signal, self.config.grid)
        logger.info(f"Quantizing {name} at ħ={hbar} on N_v={grid.N_v}")
        rep = rep_quantize(k, hbar, sign, grid, threshold=self.config.tail_threshold)
        weyl = weyl_quantize(weyl_symbol(k, hbar, sign, grid), hbar, self.weyl, grid, sign)
        check = CheckResult("quantize_paths", weyl.distance(rep), self.config.tolerances.quantize_paths)
        logger.info(f"Quantization paths differ by {check.residual:.3e}")
        return QuantizationResult(name, hbar, (lower, upper), rep, weyl, check)

    def write(self, result: QuantizationResult, directory: Path, timings: bool = True) -> Dict[str, Path]:
        """Write rep.bin and weyl.bin (with JSON headers) and report.json."""
        directory = Path(directory)
        files = {
            "rep": save_waveop(result.rep, directory / "rep.bin"),
            "weyl": save_waveop(result.weyl, directory / "weyl.bin"),
        }
        summary = {
            "signal": result.signal,
            "hbar": result.hbar,
            "admissible_hbar": list(result.admissible),
            "grid": {"L_v": result.rep.grid.L_v, "N_v": result.rep.grid.N_v},
            "checks": [result.check.to_dict(timings)],
        }
        files["report"] = directory / "report.json"
        files["report"].write_text(json.dumps(summary, sort_keys=True, indent=2) + "\n")
        result.files = files
        logger.info(f"Quantization written to {directory}")
        return files
