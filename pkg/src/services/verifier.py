"""Verification suites: every named identity of the engine as a measured residual."""

import json
import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..algebra.convolution import convolve_direct, convolve_fast
from ..algebra.pbracket import AntiMode, apply_antiderivative, pbracket
from ..config import ConfigError, RunConfig
from ..grid.catalog import Factor, TestSignal, get_signal, random_signal
from ..grid.gridfn import GridSpec, PFunction, fourier_s, sample
from ..group.heisenberg import (
    Axis,
    GroupPoint,
    InvariantField,
    Side,
    apply_field,
    field_commutator,
    inverse_coords,
    multiply_coords,
)
from ..reps.bargmann import FockVec, beta_action, dynamical_group, euler_operator
from ..reps.schrodinger import (
    BracketImageReport,
    Sign,
    WeylConfig,
    check_bracket_images,
    rep_classical,
    rep_quantize,
    weyl_quantize,
    weyl_symbol,
)

logger = logging.getLogger(__name__)

# Grids on which each identity is resolved at its default tolerance
ORACLE_GRID = GridSpec.cube(5.0, 16)
ALGEBRA_GRID = GridSpec(8.0, 5.0, 5.0, 64, 16, 16)
BRACKET_GRID = GridSpec(6.0, 5.0, 5.0, 64, 16, 16)
FIELD_GRID = GridSpec(6.0, 6.0, 6.0, 32, 64, 64)
CLASSICAL_GRID = GridSpec.cube(6.0, 32)
# wide enough in x and y that nested products of catalog signals stay on the grid
TRIPLE_GRID = GridSpec.cube(8.0, 32)

REP_HBARS = (1.0, 0.5, 0.25)
GROUP_TRIPLES = 1000
ORACLE_PAIRS = 10
FOCK_DIM = 64

# catalog pairs with a nonvanishing Poisson bracket
BRACKET_PAIRS = (
    ("shifted_gauss", "squeezed_gauss"),
    ("gauss", "shifted_gauss"),
    ("gauss", "squeezed_gauss"),
    ("gauss", "x_gauss"),
    ("x_gauss", "y_gauss"),
    ("x_gauss", "shifted_gauss"),
    ("y_gauss", "squeezed_gauss"),
    ("shifted_gauss", "q_like"),
    ("squeezed_gauss", "p_like"),
    ("q_like", "p_like"),
)

CATALOG_TRIPLES = (
    ("shifted_gauss", "squeezed_gauss", "x_gauss"),
    ("gauss", "x_gauss", "y_gauss"),
    ("s_gauss", "shifted_gauss", "squeezed_gauss"),
    ("x_gauss", "y_gauss", "shifted_gauss"),
    ("gauss", "squeezed_gauss", "y_gauss"),
)


@dataclass(frozen=True)
class CheckResult:
    """One row of a verification report."""

    check: str
    residual: float
    tolerance: float
    runtime_ms: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual <= self.tolerance)

    def to_dict(self, timings: bool = True) -> dict:
        return {
            "check": self.check,
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
            "pass": self.passed,
            "runtime_ms": round(self.runtime_ms, 3) if timings else 0.0,
        }


@dataclass
class VerificationReport:
    """Check results ordered by name."""

    results: List[CheckResult]

    def __post_init__(self):
        self.results = sorted(self.results, key=lambda r: r.check)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> List[CheckResult]:
        return [r for r in self.results if not r.passed]

    def to_json(self, timings: bool = True) -> str:
        rows = [r.to_dict(timings) for r in self.results]
        return json.dumps(rows, sort_keys=True, indent=2)

    def write(self, path: Union[str, Path], timings: bool = True) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json(timings) + "\n")
        logger.info(f"Report written to {path}")
        return path


def measure(name: str, fn: Callable[[], float], tolerance: float) -> CheckResult:
    """Run one residual function and time it."""
    start = time.perf_counter()
    residual = float(fn())
    elapsed = 1000.0 * (time.perf_counter() - start)
    result = CheckResult(name, residual, tolerance, elapsed)
    level = logging.INFO if result.passed else logging.WARNING
    logger.log(level, f"{name}: residual {residual:.3e} (tolerance {tolerance:.1e})")
    return result


def reference_triple() -> Tuple[TestSignal, TestSignal, TestSignal]:
    """Three asymmetric signals for algebraic identities."""
    return (
        TestSignal("a", Factor(0, 0.0, 1.0), Factor(1, 0.2, 2.0), Factor(0, 0.0, 2.5)),
        TestSignal("b", Factor(0, 0.1, 1.2), Factor(0, -0.2, 2.0), Factor(1, 0.0, 2.0), 1j),
        TestSignal("c", Factor(2, 0.0, 1.0), Factor(0, 0.1, 2.5), Factor(0, 0.2, 2.0), 0.5),
    )


def odd_pair() -> Tuple[TestSignal, TestSignal]:
    """Two signals with odd s-profiles."""
    return (
        TestSignal("u", Factor(1, 0.0, 1.0), Factor(0, 0.2, 2.0), Factor(1, 0.0, 2.0)),
        TestSignal("w", Factor(1, 0.0, 1.2), Factor(1, -0.1, 2.5), Factor(0, 0.3, 2.0), 1j),
    )


def jacobi_residual(k1: PFunction, k2: PFunction, k3: PFunction) -> float:
    """Cyclic sum of nested brackets relative to its largest term."""
    terms = [
        pbracket(k1, pbracket(k2, k3)),
        pbracket(k2, pbracket(k3, k1)),
        pbracket(k3, pbracket(k1, k2)),
    ]
    total = terms[0] + terms[1] + terms[2]
    return total.norm() / max(t.norm() for t in terms)


def leibniz_residual(k1: PFunction, k2: PFunction, k3: PFunction) -> float:
    """Distance of {{k1∗k2, k3}} from {{k1, k3}}∗k2 + k1∗{{k2, k3}}."""
    lhs = pbracket(convolve_fast(k1, k2), k3)
    rhs = convolve_fast(pbracket(k1, k3), k2) + convolve_fast(k1, pbracket(k2, k3))
    return lhs.distance(rhs)


class VerifierService:
    """
    Runs the named verification suites.

    Suites: heisenberg, convolution, bracket, schrodinger, bargmann.
    Representation checks use the configured grid; the algebraic suites
    use fixed grids sized for their identities.
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self.tol = config.tolerances
        self._suites: Dict[str, List[Tuple[str, Callable[[], float]]]] = {
            "heisenberg": [
                ("heisenberg_associativity", self._group_associativity),
                ("heisenberg_inverse", self._group_inverse),
                ("heisenberg_field_commutator", self._field_commutator),
                ("heisenberg_left_right_commute", self._left_right_commute),
            ],
            "convolution": [
                ("convolution_oracle", self._convolution_oracle),
                ("convolution_associativity", self._convolution_associativity),
                ("convolution_bilinearity", self._convolution_bilinearity),
                ("convolution_zero_slice", self._convolution_zero_slice),
            ],
            "bracket": [
                ("bracket_antisymmetry", self._bracket_antisymmetry),
                ("bracket_modes_agree", self._bracket_modes_agree),
                ("bracket_antiderivative_convolution", self._antiderivative_convolution),
                ("bracket_shift_commutation", self._shift_commutation),
                ("bracket_jacobi", self._jacobi),
                ("bracket_leibniz", self._leibniz),
            ],
            "schrodinger": [
                ("schrodinger_homomorphism", self._rep_homomorphism),
                ("schrodinger_classical_homomorphism", self._classical_homomorphism),
                ("schrodinger_weyl_agreement", self._weyl_agreement),
                ("schrodinger_bracket_quantum", self._bracket_quantum),
                ("schrodinger_bracket_classical", self._bracket_classical),
            ],
            "bargmann": [
                ("bargmann_euler_spectrum", self._euler_spectrum),
                ("bargmann_unitarity", self._fock_unitarity),
                ("bargmann_transitions", self._fock_transitions),
                ("bargmann_homomorphism", self._beta_homomorphism),
            ],
        }
        self._bracket_reports: Optional[List[BracketImageReport]] = None
        logger.info("VerifierService initialized")

    @property
    def suites(self) -> List[str]:
        return list(self._suites)

    def checks(self, suites: Optional[Iterable[str]] = None) -> List[str]:
        return [name for suite in self._select(suites) for name, _ in self._suites[suite]]

    def _select(self, suites: Optional[Iterable[str]]) -> List[str]:
        if not suites:
            return self.suites
        selected = list(dict.fromkeys(suites))
        unknown = [s for s in selected if s not in self._suites]
        if unknown:
            raise ConfigError(f"Unknown suite(s): {', '.join(unknown)}. Available: {', '.join(self.suites)}")
        return selected

    def run(
        self,
        suites: Optional[Iterable[str]] = None,
        on_check: Optional[Callable[[CheckResult], None]] = None,
    ) -> VerificationReport:
        """
        Run the selected suites, all of them by default.

        Raises:
            ConfigError: If a suite name is unknown
        """
        results = []
        for suite in self._select(suites):
            logger.info(f"Running suite '{suite}'")
            for name, fn in self._suites[suite]:
                result = measure(name, fn, getattr(self.tol, name))
                results.append(result)
                if on_check is not None:
                    on_check(result)
        report = VerificationReport(results)
        logger.info(f"Verification: {len(report.results) - len(report.failures)}/{len(report.results)} passed")
        return report

    # -- heisenberg --------------------------------------------------------

    def _random_coords(self, rng: np.random.Generator):
        return tuple(rng.uniform(-10.0, 10.0, GROUP_TRIPLES) for _ in range(3))

    def _group_associativity(self) -> float:
        rng = np.random.default_rng(self.config.seed)
        a, b, c = (self._random_coords(rng) for _ in range(3))
        left = multiply_coords(*multiply_coords(*a, *b), *c)
        right = multiply_coords(*a, *multiply_coords(*b, *c))
        scale = max(1.0, max(float(np.max(np.abs(v))) for v in left))
        return max(float(np.max(np.abs(l - r))) for l, r in zip(left, right)) / scale

    def _group_inverse(self) -> float:
        rng = np.random.default_rng(self.config.seed + 1)
        g = self._random_coords(rng)
        worst = 0.0
        for product in (multiply_coords(*g, *inverse_coords(*g)), multiply_coords(*inverse_coords(*g), *g)):
            worst = max(worst, max(float(np.max(np.abs(v))) for v in product))
        return worst

    def _field_commutator(self) -> float:
        k = sample(get_signal("gauss"), FIELD_GRID)
        XL = InvariantField(Side.LEFT, Axis.X)
        YL = InvariantField(Side.LEFT, Axis.Y)
        S = InvariantField(Side.LEFT, Axis.S)
        return field_commutator(XL, YL, k).distance(apply_field(S, k))

    def _left_right_commute(self) -> float:
        k = sample(get_signal("gauss"), FIELD_GRID)
        worst = 0.0
        for a in (Axis.X, Axis.Y):
            for b in (Axis.X, Axis.Y):
                left, right = InvariantField(Side.LEFT, a), InvariantField(Side.RIGHT, b)
                scale = apply_field(left, apply_field(right, k)).norm()
                worst = max(worst, field_commutator(left, right, k).norm() / scale)
        return worst

    # -- convolution -------------------------------------------------------

    def _convolution_oracle(self) -> float:
        rng = np.random.default_rng(self.config.seed)
        worst = 0.0
        for n in range(ORACLE_PAIRS):
            k1 = sample(random_signal(rng, f"r{n}a"), ORACLE_GRID)
            k2 = sample(random_signal(rng, f"r{n}b"), ORACLE_GRID)
            worst = max(worst, convolve_fast(k1, k2).distance(convolve_direct(k1, k2)))
        return worst

    def _convolution_associativity(self) -> float:
        k1, k2, k3 = (sample(t, ALGEBRA_GRID) for t in reference_triple())
        left = convolve_fast(convolve_fast(k1, k2), k3)
        return left.distance(convolve_fast(k1, convolve_fast(k2, k3)))

    def _convolution_bilinearity(self) -> float:
        rng = np.random.default_rng(self.config.seed)
        k1, k2, k3 = (sample(random_signal(rng, str(n)), ORACLE_GRID) for n in range(3))
        lhs = convolve_fast(k1 + 2.0j * k3, k2)
        rhs = convolve_fast(k1, k2) + 2.0j * convolve_fast(k3, k2)
        first = lhs.distance(rhs)
        lhs = convolve_fast(k2, k1 - 0.5 * k3)
        rhs = convolve_fast(k2, k1) - 0.5 * convolve_fast(k2, k3)
        return max(first, lhs.distance(rhs))

    def _convolution_zero_slice(self) -> float:
        k1 = sample(TestSignal("a", x_factor=Factor(0, 1.0, 1.0)), ALGEBRA_GRID)
        k2 = sample(TestSignal("b", y_factor=Factor(0, 1.0, 1.0)), ALGEBRA_GRID)
        a = fourier_s(convolve_fast(k1, k2)).slices[0]
        b = fourier_s(convolve_fast(k2, k1)).slices[0]
        return float(np.linalg.norm(a - b) / np.linalg.norm(a))

    # -- bracket -----------------------------------------------------------

    def _bracket_antisymmetry(self) -> float:
        k1, k2, _ = (sample(t, ALGEBRA_GRID) for t in reference_triple())
        b12 = pbracket(k1, k2)
        return (b12 + pbracket(k2, k1)).norm() / b12.norm() + pbracket(k1, k1).norm()

    def _bracket_modes_agree(self) -> float:
        worst = 0.0
        for signal in odd_pair():
            f = sample(signal, ALGEBRA_GRID)
            a = apply_antiderivative(f, AntiMode.FOURIER_DIVISION)
            worst = max(worst, a.distance(apply_antiderivative(f, AntiMode.GRID_CUMULATIVE)))
        return worst

    def _antiderivative_convolution(self) -> float:
        f1, f2 = (sample(t, ALGEBRA_GRID) for t in odd_pair())
        lhs = apply_antiderivative(convolve_fast(f1, f2))
        middle = convolve_fast(apply_antiderivative(f1), f2)
        right = convolve_fast(f1, apply_antiderivative(f2))
        return max(lhs.distance(middle), lhs.distance(right))

    def _shift_commutation(self) -> float:
        f = sample(get_signal("s_gauss"), BRACKET_GRID)
        anti = apply_antiderivative(f)
        worst = 0.0
        for steps in (1, 3, -4):
            lhs = apply_antiderivative(f.with_values(np.roll(f.values, steps, axis=0)))
            rhs = anti.with_values(np.roll(anti.values, steps, axis=0))
            worst = max(worst, lhs.distance(rhs))
        return worst

    def _catalog_triples(self):
        for names in CATALOG_TRIPLES:
            yield tuple(sample(get_signal(name), TRIPLE_GRID) for name in names)

    def _jacobi(self) -> float:
        return max(jacobi_residual(*triple) for triple in self._catalog_triples())

    def _leibniz(self) -> float:
        return max(leibniz_residual(*triple) for triple in self._catalog_triples())

    # -- schrodinger -------------------------------------------------------

    def _catalog_pair(self, spec: GridSpec):
        t1, t2 = (get_signal(name) for name in self.config.catalog[:2])
        return (t1, t2), (sample(t1, spec), sample(t2, spec))

    def _rep_homomorphism(self) -> float:
        _, (k1, k2) = self._catalog_pair(self.config.grid)
        product = convolve_fast(k1, k2)
        worst = 0.0
        for hbar in REP_HBARS:
            grid = self.config.wave_grid(hbar)
            lhs = rep_quantize(product, hbar, Sign.PLUS, grid)
            rhs = rep_quantize(k1, hbar, Sign.PLUS, grid) @ rep_quantize(k2, hbar, Sign.PLUS, grid)
            worst = max(worst, lhs.distance(rhs))
        return worst

    def _classical_homomorphism(self) -> float:
        k1 = sample(get_signal("gauss"), CLASSICAL_GRID)
        k2 = sample(get_signal("shifted_gauss"), CLASSICAL_GRID)
        lattice = self.config.lattice
        lhs = rep_classical(convolve_fast(k1, k2), lattice)
        return lhs.distance(rep_classical(k1, lattice).values * rep_classical(k2, lattice).values)

    def _weyl_agreement(self) -> float:
        hbar = self.config.quantize_hbar
        grid = self.config.wave_grid(hbar)
        worst = 0.0
        for name in self.config.catalog:
            k = sample(get_signal(name), self.config.grid)
            weyl = weyl_quantize(weyl_symbol(k, hbar, Sign.PLUS, grid), hbar, WeylConfig(), grid)
            worst = max(worst, weyl.distance(rep_quantize(k, hbar, Sign.PLUS, grid)))
        return worst

    def _bracket_images(self) -> List[BracketImageReport]:
        if self._bracket_reports is None:
            self._bracket_reports = []
            for names in BRACKET_PAIRS:
                signals = tuple(get_signal(name) for name in names)
                k1, k2 = (sample(t, self.config.grid) for t in signals)
                self._bracket_reports.append(check_bracket_images(
                    k1, k2, REP_HBARS, grid=self.config.fixed_wave_grid, lattice=self.config.lattice, signals=signals
                ))
        return self._bracket_reports

    def _bracket_quantum(self) -> float:
        return max(r.worst_quantum for r in self._bracket_images())

    def _bracket_classical(self) -> float:
        return max(r.classical for r in self._bracket_images())

    # -- bargmann ----------------------------------------------------------

    def _fock_state(self) -> FockVec:
        rng = np.random.default_rng(self.config.seed)
        coeffs = (rng.normal(size=32) + 1j * rng.normal(size=32)) * np.exp(-np.arange(32))
        return FockVec(coeffs / np.linalg.norm(coeffs))

    def _euler_spectrum(self) -> float:
        spectrum = euler_operator(FOCK_DIM, form="generator").spectrum()
        return float(np.max(np.abs(spectrum - (np.arange(FOCK_DIM) + 0.5))))

    def _fock_unitarity(self) -> float:
        f = self._fock_state()
        return max(abs(dynamical_group(f, t).norm() - f.norm()) for t in (0.3, 2.0, 17.5))

    def _fock_transitions(self) -> float:
        worst = 0.0
        for m in range(FOCK_DIM):
            evolved = np.array(dynamical_group(FockVec.basis(FOCK_DIM, m), 1.234).coeffs)
            evolved[m] = 0.0
            worst = max(worst, float(np.max(np.abs(evolved))))
        return worst

    def _beta_homomorphism(self) -> float:
        f = self._fock_state()
        hbar = 0.5
        g = GroupPoint(0.1, 0.2, -0.1)
        h = GroupPoint(-0.3, 0.15, 0.25)
        lhs = beta_action(g, hbar, beta_action(h, hbar, f))
        return lhs.distance(beta_action(g * h, hbar, f))


def summarize(results: Sequence[CheckResult]) -> Dict[str, int]:
    passed = sum(r.passed for r in results)
    return {"passed": passed, "failed": len(results) - passed}
