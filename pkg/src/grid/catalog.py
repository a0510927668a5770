"""Analytic test signals: separable Gaussian-times-monomial observables with exact transforms."""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Tuple

import numpy as np

logger = logging.getLogger(__name__)


class CatalogError(Exception):
    """Base exception for catalog errors."""
    pass


@dataclass(frozen=True)
class Factor:
    """
    One-variable factor (v - center)^degree * exp(-width * (v - center)^2).

    `width` is the Gaussian exponent a, not a standard deviation.
    """

    degree: int = 0
    center: float = 0.0
    width: float = 1.0

    def __post_init__(self):
        if self.degree not in (0, 1, 2):
            raise CatalogError(f"Factor degree must be 0, 1 or 2, got {self.degree}")
        if self.width <= 0:
            raise CatalogError(f"Factor width must be positive, got {self.width}")

    def __call__(self, v: np.ndarray) -> np.ndarray:
        u = v - self.center
        return u ** self.degree * np.exp(-self.width * u * u)

    def _poly(self, w: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        a = self.width
        w = np.asarray(w, dtype=complex)
        if self.degree == 0:
            return np.ones_like(w), np.zeros_like(w)
        if self.degree == 1:
            return -1j * w / (2 * a), np.full_like(w, -1j / (2 * a))
        return 1 / (2 * a) - w * w / (4 * a * a), -w / (2 * a * a)

    def transform(self, w: np.ndarray) -> np.ndarray:
        """Exact ∫ f(v) e^{-ivw} dv."""
        a, c = self.width, self.center
        w = np.asarray(w, dtype=complex)
        poly, _ = self._poly(w)
        gauss = np.sqrt(np.pi / a) * np.exp(-w * w / (4 * a))
        return np.exp(-1j * c * w) * poly * gauss

    def transform_derivative(self, w: np.ndarray) -> np.ndarray:
        """Exact derivative in w of `transform`."""
        a, c = self.width, self.center
        w = np.asarray(w, dtype=complex)
        poly, dpoly = self._poly(w)
        gauss = np.sqrt(np.pi / a) * np.exp(-w * w / (4 * a))
        return np.exp(-1j * c * w) * (-1j * c * poly + dpoly - poly * w / (2 * a)) * gauss

    @property
    def is_odd(self) -> bool:
        return self.degree == 1 and self.center == 0.0

    @property
    def is_even(self) -> bool:
        return self.degree != 1 and self.center == 0.0


@dataclass(frozen=True)
class TestSignal:
    """
    Observable amplitude * f_s(s) * f_x(x) * f_y(y) with closed-form transforms.

    The mixed transform uses the representation phase:
    k̂(ħ, q, p) = ∫ k e^{-isħ + i(qx + py)} ds dx dy.
    """

    __test__ = False

    name: str
    s_factor: Factor = Factor()
    x_factor: Factor = Factor()
    y_factor: Factor = Factor()
    amplitude: complex = 1.0

    def evaluate(self, s: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.amplitude * self.s_factor(s) * self.x_factor(x) * self.y_factor(y)

    @property
    def in_l1v(self) -> bool:
        """True when the s-profile has vanishing mean (odd about 0)."""
        return self.s_factor.is_odd

    def transform(self, hbar, q, p) -> np.ndarray:
        return (
            self.amplitude
            * self.s_factor.transform(hbar)
            * self.x_factor.transform(-np.asarray(q))
            * self.y_factor.transform(-np.asarray(p))
        )

    def classical(self, q, p) -> np.ndarray:
        """Closed-form classical image k̂(0, q, p)."""
        return self.transform(0.0, q, p)

    def gradient(self, hbar, q, p) -> Tuple[np.ndarray, np.ndarray]:
        """(∂_q k̂, ∂_p k̂) at the given points."""
        q = np.asarray(q)
        p = np.asarray(p)
        ts = self.amplitude * self.s_factor.transform(hbar)
        tx = self.x_factor.transform(-q)
        ty = self.y_factor.transform(-p)
        dq = -ts * self.x_factor.transform_derivative(-q) * ty
        dp = -ts * tx * self.y_factor.transform_derivative(-p)
        return dq, dp

    def fourier_s(self, hbar: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Closed-form unitary s-transform on (hbar, x, y) arrays."""
        return (
            self.amplitude
            * self.s_factor.transform(hbar)
            / np.sqrt(2 * np.pi)
            * self.x_factor(x)
            * self.y_factor(y)
        )

    def s_moment_integral(self) -> complex:
        """∫ s f_s(s) ds, from the derivative of the s-transform at zero."""
        return complex(1j * self.s_factor.transform_derivative(0.0))

    def scaled(self, factor: complex, name: str = "") -> "TestSignal":
        return TestSignal(
            name or self.name, self.s_factor, self.x_factor, self.y_factor,
            self.amplitude * factor,
        )


def poisson_bracket(k1: TestSignal, k2: TestSignal, q, p) -> np.ndarray:
    """Analytic {k̂1, k̂2} = ∂_q k̂1 ∂_p k̂2 - ∂_p k̂1 ∂_q k̂2 of the classical images."""
    dq1, dp1 = k1.gradient(0.0, q, p)
    dq2, dp2 = k2.gradient(0.0, q, p)
    return dq1 * dp2 - dp1 * dq2


def generator_signal(axis: str, width: float = 4.0, s_width: float = 1.0, spread: float = 1.0) -> TestSignal:
    """
    Smeared Lie-algebra generator whose classical image is q (or p) times a broad Gaussian.

    Args:
        axis: "x" for the q-like observable, "y" for the p-like one
        width: Gaussian exponent along the generator axis; larger is narrower in
            the group and broader in phase space
        s_width: Gaussian exponent of the s-profile
        spread: Gaussian exponent of the remaining axis
    """
    if axis not in ("x", "y"):
        raise CatalogError(f"Generator axis must be 'x' or 'y', got {axis}")
    odd = Factor(1, 0.0, width)
    flat = Factor(0, 0.0, spread)
    s_factor = Factor(0, 0.0, s_width)
    # amplitude makes the classical image exactly q·exp(...) or p·exp(...)
    norm = np.pi ** 1.5 / np.sqrt(s_width * width * spread)
    amplitude = -2j * width / norm
    if axis == "x":
        return TestSignal("q_like", s_factor, odd, flat, amplitude)
    return TestSignal("p_like", s_factor, flat, odd, amplitude)


def _gauss() -> TestSignal:
    return TestSignal("gauss")


def _s_gauss() -> TestSignal:
    return TestSignal("s_gauss", s_factor=Factor(1, 0.0, 1.0))


def _x_gauss() -> TestSignal:
    return TestSignal("x_gauss", x_factor=Factor(1, 0.0, 1.0))


def _y_gauss() -> TestSignal:
    return TestSignal("y_gauss", y_factor=Factor(1, 0.0, 1.0))


def _shifted_gauss() -> TestSignal:
    return TestSignal(
        "shifted_gauss",
        x_factor=Factor(0, 0.5, 1.0),
        y_factor=Factor(0, -0.3, 1.2),
    )


def _squeezed_gauss() -> TestSignal:
    return TestSignal(
        "squeezed_gauss",
        s_factor=Factor(2, 0.0, 1.0),
        x_factor=Factor(0, 0.0, 2.0),
        y_factor=Factor(0, 0.0, 0.8),
        amplitude=0.5 + 0.5j,
    )


CATALOG: Dict[str, Callable[[], TestSignal]] = {
    "gauss": _gauss,
    "s_gauss": _s_gauss,
    "x_gauss": _x_gauss,
    "y_gauss": _y_gauss,
    "shifted_gauss": _shifted_gauss,
    "squeezed_gauss": _squeezed_gauss,
    "q_like": lambda: generator_signal("x"),
    "p_like": lambda: generator_signal("y"),
}


def get_signal(name: str) -> TestSignal:
    """
    Look up a catalog signal by name.

    Raises:
        CatalogError: If the name is unknown
    """
    try:
        return CATALOG[name]()
    except KeyError:
        raise CatalogError(
            f"Unknown signal '{name}'. Available: {', '.join(sorted(CATALOG))}"
        ) from None


def random_signal(
    rng: np.random.Generator,
    name: str = "random",
    l1v: bool = False,
    even_s: bool = False,
    max_degree: int = 1,
    width_range: Tuple[float, float] = (0.9, 1.6),
    center_range: float = 0.4,
) -> TestSignal:
    """
    Draw a random separable signal.

    Args:
        rng: Seeded generator
        l1v: Force an odd s-profile (vanishing s-mean)
        even_s: Force an s-profile even about 0
        max_degree: Highest monomial degree in x and y
        width_range: Range of Gaussian exponents
        center_range: Centers are drawn from [-center_range, center_range]
    """
    if l1v and even_s:
        raise CatalogError("A signal cannot be both odd and even in s")

    def draw(degree: int, centered: bool) -> Factor:
        width = float(rng.uniform(*width_range))
        center = 0.0 if centered else float(rng.uniform(-center_range, center_range))
        return Factor(degree, center, width)

    if l1v:
        s_factor = draw(1, True)
    elif even_s:
        s_factor = draw(int(rng.choice([0, 2])), True)
    else:
        s_factor = draw(int(rng.integers(0, 2)), False)
    x_factor = draw(int(rng.integers(0, max_degree + 1)), False)
    y_factor = draw(int(rng.integers(0, max_degree + 1)), False)
    amplitude = complex(rng.normal(), rng.normal())
    amplitude /= abs(amplitude)
    logger.debug(f"Random signal {name}: s={s_factor}, x={x_factor}, y={y_factor}")
    return TestSignal(name, s_factor, x_factor, y_factor, amplitude)
