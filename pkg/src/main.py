"""Main entry point for the pmech engine."""

import logging
import sys
from pathlib import Path
from typing import Callable, Iterable, List, Optional

from .config import RunConfig, load_config
from .services.correspondence import CorrespondenceResult, CorrespondenceService
from .services.oscillator_run import DEFAULT_DT, DEFAULT_T_END, OscillatorResult, OscillatorService
from .services.quantizer import QuantizationResult, QuantizerService
from .services.verifier import CheckResult, VerificationReport, VerifierService

logger = logging.getLogger(__name__)


class Application:
    """Main application class: owns the configuration and the services built from it."""

    def __init__(self, config: Optional[RunConfig] = None, timings: bool = True):
        """
        Initialize application.

        Args:
            config: Optional configuration (loaded with defaults if not provided)
            timings: Record check runtimes in reports; off gives byte-identical reports
        """
        if config is None:
            config = load_config()

        self.config = config
        self.timings = timings

        self.config.setup_logging()

        logger.info("=" * 60)
        logger.info("pmech starting")
        logger.info("=" * 60)
        logger.info(f"Configuration: {self.config}")

        self.verifier: Optional[VerifierService] = None
        self.oscillator_service: Optional[OscillatorService] = None
        self.quantizer: Optional[QuantizerService] = None
        self.correspondence_service: Optional[CorrespondenceService] = None

        self._initialized = False

    @property
    def outdir(self) -> Path:
        return Path(self.config.outdir)

    def initialize(self) -> None:
        """Build every service from the configuration."""
        if self._initialized:
            logger.warning("Application already initialized")
            return

        try:
            logger.info("Initializing services...")
            self.verifier = VerifierService(self.config)
            self.oscillator_service = OscillatorService(self.config)
            self.quantizer = QuantizerService(self.config)
            self.correspondence_service = CorrespondenceService(self.config)
            self._initialized = True
            logger.info("All services initialized successfully")
        except Exception as e:
            logger.error(f"Failed to initialize application: {e}")
            self.cleanup()
            raise

    def cleanup(self) -> None:
        """Release services."""
        logger.info("Cleaning up application resources...")
        self.verifier = None
        self.oscillator_service = None
        self.quantizer = None
        self.correspondence_service = None
        self._initialized = False
        logger.info("Cleanup complete")

    def __enter__(self):
        """Context manager entry."""
        self.initialize()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        """Context manager exit."""
        self.cleanup()

    def _require(self) -> None:
        if not self._initialized:
            self.initialize()

    def verify(
        self,
        suites: Optional[Iterable[str]] = None,
        on_check: Optional[Callable[[CheckResult], None]] = None,
    ) -> VerificationReport:
        """Run verification suites and write verify/report.json."""
        self._require()
        report = self.verifier.run(suites, on_check)
        report.write(self.outdir / "verify" / "report.json", self.timings)
        return report

    def oscillator(
        self,
        t_end: float = DEFAULT_T_END,
        dt: float = DEFAULT_DT,
        on_step: Optional[Callable[[int, int], None]] = None,
    ) -> OscillatorResult:
        """Run the oscillator and write oscillator/trajectory.csv and report.json."""
        self._require()
        result = self.oscillator_service.run(t_end, dt, on_step)
        self.oscillator_service.write(result, self.outdir / "oscillator", self.timings)
        return result

    def quantize(self, name: str, hbar: Optional[float] = None) -> QuantizationResult:
        """Quantize a catalog signal and write quantize/<name>/."""
        self._require()
        result = self.quantizer.quantize(name, hbar)
        self.quantizer.write(result, self.outdir / "quantize" / name, self.timings)
        return result

    def correspondence(self, names: Optional[List[str]] = None) -> CorrespondenceResult:
        """Sweep the ħ list and write correspondence/correspondence.csv and report.json."""
        self._require()
        result = self.correspondence_service.run(names)
        self.correspondence_service.write(result, self.outdir / "correspondence", self.timings)
        return result


def main():
    """Run every verification suite with the default configuration."""
    try:
        with Application() as app:
            report = app.verify()
        sys.exit(0 if report.passed else 1)
    except KeyboardInterrupt:
        logger.info("Application stopped by user")
        sys.exit(0)
    except Exception as e:
        logger.error(f"Application error: {e}")
        sys.exit(1)


if __name__ == "__main__":
    main()
