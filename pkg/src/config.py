"""Run configuration for the pmech engine."""

import logging
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

import numpy as np
from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .grid.catalog import CATALOG
from .grid.gridfn import GridSpec
from .reps.schrodinger import PhaseLattice, WaveGrid

logger = logging.getLogger(__name__)

DEFAULT_EXTENT = 2.0 * float(np.sqrt(2.0 * np.pi))

# Checks whose residual rests on quadrature over the group grid
QUADRATURE_CHECKS = (
    "convolution_oracle",
    "schrodinger_homomorphism",
    "schrodinger_classical_homomorphism",
    "schrodinger_weyl_agreement",
    "schrodinger_bracket_quantum",
    "schrodinger_bracket_classical",
    "quantize_paths",
)


class ConfigError(Exception):
    """Invalid configuration file, override or value."""
    pass


def _power_of_two(v: int, minimum: int) -> int:
    if v < minimum or v & (v - 1):
        raise ValueError(f"must be a power of two >= {minimum}, got {v}")
    return v


class Tolerances(BaseModel):
    """
    Acceptance tolerance per named check.

    Names match the check names of verification and oscillator reports.
    An override may also name a group: a suite prefix such as "bracket", or
    "quadrature" for the checks that rest on group-grid quadrature.
    """

    model_config = ConfigDict(extra="forbid", validate_assignment=True)

    heisenberg_associativity: float = 1e-12
    heisenberg_inverse: float = 1e-12
    heisenberg_field_commutator: float = 1e-7
    heisenberg_left_right_commute: float = 1e-7

    convolution_oracle: float = 1e-8
    convolution_associativity: float = 1e-7
    convolution_bilinearity: float = 1e-12
    convolution_zero_slice: float = 1e-10

    bracket_antisymmetry: float = 1e-14
    bracket_modes_agree: float = 1e-7
    bracket_antiderivative_convolution: float = 1e-7
    bracket_shift_commutation: float = 1e-9
    bracket_jacobi: float = 1e-6
    bracket_leibniz: float = 1e-6

    schrodinger_homomorphism: float = 1e-3
    schrodinger_classical_homomorphism: float = 1e-6
    schrodinger_weyl_agreement: float = 1e-3
    schrodinger_bracket_quantum: float = 1e-3
    schrodinger_bracket_classical: float = 1e-4

    bargmann_euler_spectrum: float = 1e-12
    bargmann_unitarity: float = 1e-14
    bargmann_transitions: float = 1e-14
    bargmann_homomorphism: float = 1e-6

    oscillator_transport: float = 1e-5
    oscillator_recurrence: float = 1e-5
    oscillator_heisenberg: float = 1e-2
    oscillator_hamilton: float = 1e-2
    oscillator_alternative: float = 1e-2
    oscillator_period: float = 1e-2

    quantize_paths: float = 1e-3
    correspondence_slope: float = 0.2

    @field_validator("*")
    @classmethod
    def validate_positive(cls, v: float) -> float:
        """Tolerances must be positive."""
        if not v > 0:
            raise ValueError(f"Tolerance must be positive, got {v}")
        return v

    @classmethod
    def groups(cls) -> Dict[str, List[str]]:
        """Group name to member tolerances: one group per suite prefix, plus quadrature."""
        groups: Dict[str, List[str]] = {}
        for name in cls.model_fields:
            groups.setdefault(name.split("_", 1)[0], []).append(name)
        groups["quadrature"] = list(QUADRATURE_CHECKS)
        return groups

    def override(self, overrides: Mapping[str, float]) -> "Tolerances":
        """
        Copy with some tolerances replaced.

        Group names expand to their members; a check named on its own wins
        over its group.

        Raises:
            ConfigError: If a name is neither a check nor a group, or a value is invalid
        """
        fields = type(self).model_fields
        groups = type(self).groups()
        unknown = sorted(name for name in overrides if name not in fields and name not in groups)
        if unknown:
            raise ConfigError(
                f"Unknown tolerance name(s): {', '.join(unknown)}. Groups: {', '.join(sorted(groups))}"
            )
        expanded: Dict[str, float] = {}
        for name, value in overrides.items():
            if name not in fields:
                expanded.update({member: value for member in groups[name]})
        expanded.update({name: value for name, value in overrides.items() if name in fields})
        logger.debug(f"Tolerance overrides: {expanded}")
        try:
            return type(self)(**{**self.model_dump(), **expanded})
        except ValidationError as e:
            raise ConfigError(str(e)) from None


class Environment(BaseSettings):
    """The one environment variable read: PMECH_OUTDIR."""

    model_config = SettingsConfigDict(env_prefix="PMECH_", extra="ignore")

    outdir: Optional[Path] = Field(None, description="Output directory override")


class RunConfig(BaseModel):
    """
    Parameters of a pmech run.

    Defaults give the group grid dual to the matched wave grids
    (h_x = h_y = √(2π)/8) and the ħ list of the correspondence sweep.
    """

    model_config = ConfigDict(extra="forbid", validate_assignment=True)

    # Group grid
    L_s: float = Field(default=6.0, description="Half-extent of the s axis")
    L_x: float = Field(default=DEFAULT_EXTENT, description="Half-extent of the x axis")
    L_y: float = Field(default=DEFAULT_EXTENT, description="Half-extent of the y axis")
    N_s: int = Field(default=32, description="Points on the s axis")
    N_x: int = Field(default=32, description="Points on the x axis")
    N_y: int = Field(default=32, description="Points on the y axis")

    # Wave grid; unset means the grid matched to each ħ
    L_v: Optional[float] = Field(default=None, description="Half-extent of the wave grid")
    N_v: Optional[int] = Field(default=None, description="Points of the wave grid")

    hbar_list: List[float] = Field(
        default_factory=lambda: [0.4, 0.2, 0.1, 0.05],
        description="Planck values for sweeps",
    )
    quantize_hbar: float = Field(default=0.5, description="Default ħ of the quantize command")

    # Classical lattice
    q_max: float = Field(default=3.0, description="Half-width of the q range")
    p_max: float = Field(default=3.0, description="Half-width of the p range")
    n_q: int = Field(default=13, description="Lattice points in q")
    n_p: int = Field(default=13, description="Lattice points in p")

    tolerances: Tolerances = Field(default_factory=Tolerances)
    catalog: List[str] = Field(
        default_factory=lambda: ["shifted_gauss", "squeezed_gauss", "x_gauss"],
        description="Catalog signals used by the suites",
    )
    seed: int = Field(default=0, description="Seed of the random catalog draws")
    outdir: Path = Field(default=Path("pmech-out"), description="Output directory")

    tail_threshold: float = Field(default=0.01, description="Boundary tail-mass guard")
    nyquist_threshold: float = Field(default=1e-4, description="Spectral resolution guard")
    snapshots: int = Field(default=50, description="Trajectory snapshots")

    log_level: str = Field(default="INFO", description="Logging level")
    log_file: Optional[str] = Field(default=None, description="Log file path")

    @field_validator("L_s", "L_x", "L_y", "quantize_hbar", "q_max", "p_max", "tail_threshold", "nyquist_threshold")
    @classmethod
    def validate_positive(cls, v: float) -> float:
        """Validate positive reals."""
        if not v > 0:
            raise ValueError(f"must be positive, got {v}")
        return v

    @field_validator("N_s", "N_x", "N_y")
    @classmethod
    def validate_grid_points(cls, v: int) -> int:
        """Group grid axes need powers of two >= 16."""
        return _power_of_two(v, 16)

    @field_validator("L_v")
    @classmethod
    def validate_wave_extent(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and not v > 0:
            raise ValueError(f"must be positive, got {v}")
        return v

    @field_validator("N_v")
    @classmethod
    def validate_wave_points(cls, v: Optional[int]) -> Optional[int]:
        return v if v is None else _power_of_two(v, 32)

    @field_validator("hbar_list")
    @classmethod
    def validate_hbar_list(cls, v: List[float]) -> List[float]:
        if not v or any(not h > 0 for h in v):
            raise ValueError("ħ values must be positive and the list non-empty")
        return v

    @field_validator("n_q", "n_p", "snapshots")
    @classmethod
    def validate_count(cls, v: int) -> int:
        if v < 1:
            raise ValueError(f"must be at least 1, got {v}")
        return v

    @field_validator("catalog")
    @classmethod
    def validate_catalog(cls, v: List[str]) -> List[str]:
        """Validate catalog names."""
        unknown = [name for name in v if name not in CATALOG]
        if unknown:
            raise ValueError(f"Unknown catalog signal(s): {unknown}. Available: {sorted(CATALOG)}")
        if len(v) < 2:
            raise ValueError("At least two catalog signals are needed")
        return v

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level."""
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        v_upper = v.upper()
        if v_upper not in valid_levels:
            raise ValueError(f"Invalid log level: {v}. Must be one of {valid_levels}")
        return v_upper

    @property
    def grid(self) -> GridSpec:
        return GridSpec(self.L_s, self.L_x, self.L_y, self.N_s, self.N_x, self.N_y)

    @property
    def lattice(self) -> PhaseLattice:
        return PhaseLattice(self.q_max, self.p_max, self.n_q, self.n_p)

    def wave_grid(self, hbar: float) -> WaveGrid:
        """Configured wave grid, or the one matched to ħ when none is set."""
        if self.L_v is not None and self.N_v is not None:
            return WaveGrid(self.L_v, self.N_v)
        return WaveGrid.matched(self.grid, hbar, self.N_v)

    @property
    def fixed_wave_grid(self) -> Optional[WaveGrid]:
        """The configured wave grid, or None when grids are matched per ħ."""
        if self.L_v is not None and self.N_v is not None:
            return WaveGrid(self.L_v, self.N_v)
        return None

    def setup_logging(self) -> None:
        """Configure logging based on settings."""
        if self.log_file:
            log_path = Path(self.log_file)
            log_path.parent.mkdir(parents=True, exist_ok=True)

        log_format = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
        handlers: List[logging.Handler] = []

        console_handler = logging.StreamHandler()
        console_handler.setFormatter(logging.Formatter(log_format))
        handlers.append(console_handler)

        if self.log_file:
            try:
                file_handler = logging.FileHandler(self.log_file)
                file_handler.setFormatter(logging.Formatter(log_format))
                handlers.append(file_handler)
            except OSError as e:
                logger.warning(f"Could not create log file: {e}")

        logging.basicConfig(
            level=getattr(logging, self.log_level),
            format=log_format,
            handlers=handlers,
            force=True,
        )
        logger.info(f"Logging configured: level={self.log_level}")
        if self.log_file:
            logger.info(f"Log file: {self.log_file}")

    def __repr__(self) -> str:
        return (
            f"RunConfig(grid={self.grid.shape}, hbar_list={self.hbar_list}, "
            f"seed={self.seed}, outdir={self.outdir})"
        )


_LIST_FIELDS = {"hbar_list": float, "catalog": str}


def _parse_value(key: str, raw: Any) -> Any:
    """Turn a raw text value into what the RunConfig field expects."""
    if key in _LIST_FIELDS and isinstance(raw, str):
        kind = _LIST_FIELDS[key]
        return [kind(item.strip()) for item in raw.split(",") if item.strip()]
    if raw == "" or (isinstance(raw, str) and raw.lower() == "none"):
        return None
    return raw


def parse_tolerance_overrides(items: List[str]) -> Dict[str, float]:
    """
    Parse NAME=VALUE tolerance overrides.

    Raises:
        ConfigError: If an item is malformed
    """
    overrides: Dict[str, float] = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise ConfigError(f"Tolerance override must be NAME=VALUE, got '{item}'")
        try:
            overrides[name.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"Tolerance '{name}' has a non-numeric value '{value}'") from None
    return overrides


def load_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    tolerances: Optional[Mapping[str, float]] = None,
) -> RunConfig:
    """
    Load a run configuration.

    The file is plain key=value text. Values are applied in order: file,
    then PMECH_OUTDIR, then overrides. Tolerance keys in the file are
    written as tol.NAME=VALUE.

    Args:
        path: Optional key=value file
        overrides: Field values from command-line flags; None entries are skipped
        tolerances: Tolerance overrides by check name

    Returns:
        RunConfig instance

    Raises:
        ConfigError: If the file is missing or a value is invalid
    """
    values: Dict[str, Any] = {}
    tol: Dict[str, float] = {}

    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"Config file not found: {path}")
        for key, raw in dotenv_values(path).items():
            if key.startswith("tol."):
                tol.update(parse_tolerance_overrides([f"{key[4:]}={raw}"]))
            else:
                values[key] = _parse_value(key, raw)
        logger.debug(f"Read {len(values)} settings from {path}")

    env = Environment()
    if env.outdir is not None:
        values["outdir"] = env.outdir

    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = _parse_value(key, value)
    tol.update(tolerances or {})

    try:
        config = RunConfig(**values)
        if tol:
            config.tolerances = config.tolerances.override(tol)
    except ValidationError as e:
        logger.error(f"Failed to load configuration: {e}")
        raise ConfigError(str(e)) from None
    logger.debug("Configuration loaded successfully")
    return config
