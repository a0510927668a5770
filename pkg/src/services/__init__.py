"""Service layer: verification suites, oscillator runs, quantization and correspondence sweeps."""

from .verifier import CheckResult, VerificationReport, VerifierService
from .oscillator_run import OscillatorResult, OscillatorService
from .quantizer import QuantizationResult, QuantizerService
from .correspondence import CorrespondenceResult, CorrespondenceService

__all__ = [
    "CheckResult",
    "VerificationReport",
    "VerifierService",
    "OscillatorResult",
    "OscillatorService",
    "QuantizationResult",
    "QuantizerService",
    "CorrespondenceResult",
    "CorrespondenceService",
]
