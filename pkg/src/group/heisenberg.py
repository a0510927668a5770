"""Heisenberg group arithmetic and invariant vector fields."""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

import numpy as np

from ..grid.gridfn import PFunction, nyquist_ratio, spectral_derivative

logger = logging.getLogger(__name__)

NYQUIST_THRESHOLD = 1e-4


class HeisenbergError(Exception):
    """Base exception for group and field errors."""
    pass


class DimensionMismatchError(HeisenbergError):
    """Group points or fields of different dimension n were combined."""
    pass


class GridTooCoarseError(HeisenbergError):
    """Input spectrum reaches the Nyquist band; derivatives would alias."""
    pass


def _as_vector(v: Union[float, Sequence[float]]) -> Tuple[float, ...]:
    return tuple(float(c) for c in np.atleast_1d(np.asarray(v, dtype=float)))


@dataclass(frozen=True)
class GroupPoint:
    """Element (s, x, y) of H^n; x and y have length n."""

    s: float
    x: Tuple[float, ...] = field(default=(0.0,))
    y: Tuple[float, ...] = field(default=(0.0,))

    def __post_init__(self):
        object.__setattr__(self, "s", float(self.s))
        object.__setattr__(self, "x", _as_vector(self.x))
        object.__setattr__(self, "y", _as_vector(self.y))
        if len(self.x) != len(self.y) or len(self.x) == 0:
            raise DimensionMismatchError(
                f"x and y must have equal positive length, got {len(self.x)} and {len(self.y)}"
            )
        if not np.all(np.isfinite((self.s,) + self.x + self.y)):
            raise HeisenbergError(f"Group point coordinates must be finite: {self}")

    @property
    def n(self) -> int:
        return len(self.x)

    @classmethod
    def identity(cls, n: int = 1) -> "GroupPoint":
        return cls(0.0, (0.0,) * n, (0.0,) * n)

    def as_array(self) -> np.ndarray:
        return np.array((self.s,) + self.x + self.y)

    def __mul__(self, other: "GroupPoint") -> "GroupPoint":
        return multiply(self, other)

    def isclose(self, other: "GroupPoint", atol: float = 1e-12) -> bool:
        return self.n == other.n and np.allclose(self.as_array(), other.as_array(), rtol=0, atol=atol)


def symplectic(x, y, x2, y2):
    """½(x·y2 - x2·y), the central twist of the group law."""
    return 0.5 * (np.dot(x, y2) - np.dot(x2, y))


def multiply(g: GroupPoint, h: GroupPoint) -> GroupPoint:
    """
    Group law (s, x, y)·(s', x', y') = (s + s' + ½(x·y' - x'·y), x + x', y + y').

    Raises:
        DimensionMismatchError: If g and h have different n
    """
    if g.n != h.n:
        raise DimensionMismatchError(f"Cannot multiply H^{g.n} by H^{h.n}")
    gx, gy, hx, hy = map(np.asarray, (g.x, g.y, h.x, h.y))
    return GroupPoint(
        g.s + h.s + symplectic(gx, gy, hx, hy),
        tuple(gx + hx),
        tuple(gy + hy),
    )


def inverse(g: GroupPoint) -> GroupPoint:
    return GroupPoint(-g.s, tuple(-c for c in g.x), tuple(-c for c in g.y))


def multiply_coords(s1, x1, y1, s2, x2, y2):
    """Group law on broadcastable coordinate arrays (n = 1)."""
    return s1 + s2 + 0.5 * (x1 * y2 - x2 * y1), x1 + x2, y1 + y2


def inverse_coords(s, x, y):
    return -s, -x, -y


def left_quotient_coords(s1, x1, y1, s2, x2, y2):
    """Coordinates of h⁻¹g for h = (s1, x1, y1), g = (s2, x2, y2)."""
    return multiply_coords(*inverse_coords(s1, x1, y1), s2, x2, y2)


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"


class Axis(str, Enum):
    X = "X"
    Y = "Y"
    S = "S"


@dataclass(frozen=True)
class InvariantField:
    """Left or right invariant vector field X_j, Y_j or S on H^n."""

    side: Side
    axis: Axis
    index: int = 1
    n: int = 1

    def __post_init__(self):
        object.__setattr__(self, "side", Side(self.side))
        object.__setattr__(self, "axis", Axis(self.axis))
        if not 1 <= self.index <= self.n:
            raise DimensionMismatchError(f"Field index {self.index} outside [1, {self.n}]")

    def __str__(self) -> str:
        suffix = "" if self.axis == Axis.S else ("^l" if self.side == Side.LEFT else "^r")
        return f"{self.axis.value}{suffix}"


def check_resolution(k: PFunction, axes: Iterable[int], threshold: float) -> None:
    for axis in sorted(set(axes)):
        ratio = nyquist_ratio(k.values, axis)
        if ratio > threshold:
            logger.error(f"Nyquist check failed on axis {axis}: ratio {ratio:.2e}")
            raise GridTooCoarseError(
                f"Spectrum on axis {'sxy'[axis]} reaches the Nyquist band "
                f"(ratio {ratio:.2e} > {threshold:.1e}); refine the grid"
            )


def _axes_touched(axis: Axis) -> Tuple[int, ...]:
    return {Axis.S: (0,), Axis.X: (0, 1), Axis.Y: (0, 2)}[axis]


def _field_values(F: InvariantField, values: np.ndarray, k: PFunction) -> np.ndarray:
    spec = k.spec
    ds = spectral_derivative(values, 0, spec.h_s)
    if F.axis == Axis.S:
        return ds
    # central coefficients: left X has -y/2, left Y has +x/2; right fields flip them
    sign = 1.0 if F.side == Side.LEFT else -1.0
    if F.axis == Axis.X:
        y = spec.y[np.newaxis, np.newaxis, :]
        return spectral_derivative(values, 1, spec.h_x) - sign * 0.5 * y * ds
    x = spec.x[np.newaxis, :, np.newaxis]
    return spectral_derivative(values, 2, spec.h_y) + sign * 0.5 * x * ds


def apply_field(
    F: InvariantField,
    k: PFunction,
    check: bool = True,
    threshold: float = NYQUIST_THRESHOLD,
) -> PFunction:
    """
    Apply an invariant vector field by spectral differentiation.

    Left X = ∂x - (y/2)∂s, left Y = ∂y + (x/2)∂s; right fields flip the
    central sign; S = ∂s.

    Args:
        F: Field to apply
        k: Sampled observable
        check: Run the Nyquist guard on k first
        threshold: Allowed top-band spectral ratio

    Returns:
        F k on the same grid

    Raises:
        DimensionMismatchError: If the field does not live on H^1
        GridTooCoarseError: If k is not resolved by the grid
    """
    if F.n != 1:
        raise DimensionMismatchError(f"Grid operations need n = 1, got n = {F.n}")
    if check:
        check_resolution(k, _axes_touched(F.axis), threshold)
    return k.with_values(_field_values(F, k.values, k))


def field_commutator(F: InvariantField, G: InvariantField, k: PFunction) -> PFunction:
    """[F, G]k = F(Gk) - G(Fk)."""
    return apply_field(F, apply_field(G, k)) - apply_field(G, apply_field(F, k), check=False)


def apply_word(
    word: str,
    side: Union[Side, str],
    k: PFunction,
    check: bool = True,
    threshold: float = NYQUIST_THRESHOLD,
) -> PFunction:
    """
    Apply the operator product of a word over {X, Y, S} of fields of one side.

    The word "XY" is the operator X∘Y, so its last letter acts first.
    """
    side = Side(side)
    letters = [Axis(c) for c in word]
    if check and letters:
        axes = [a for letter in letters for a in _axes_touched(letter)]
        check_resolution(k, axes, threshold)
    values = k.values
    for letter in reversed(letters):
        values = _field_values(InvariantField(side, letter), values, k)
    return k.with_values(values)


@dataclass(frozen=True)
class FieldPolynomial:
    """
    Real linear combination of words in invariant fields.

    A word describes the kernel P(X, Y, S)δ: convolving with it from the
    right applies the word in left fields, from the left the reversed word
    in right fields.
    """

    terms: Tuple[Tuple[str, float], ...]

    def __post_init__(self):
        for word, coeff in self.terms:
            if any(c not in "XYS" for c in word):
                raise HeisenbergError(f"Invalid letter in word '{word}'")
            if not np.isfinite(coeff) or np.iscomplexobj(coeff):
                raise HeisenbergError(f"Coefficient of '{word}' must be a finite real")

    @classmethod
    def from_mapping(cls, terms: Mapping[str, float]) -> "FieldPolynomial":
        return cls(tuple((w, float(c)) for w, c in terms.items()))

    @property
    def degree(self) -> int:
        return max((len(w) for w, _ in self.terms), default=0)

    def as_dict(self) -> Dict[str, float]:
        out: Dict[str, float] = {}
        for word, coeff in self.terms:
            out[word] = out.get(word, 0.0) + coeff
        return out

    def right_convolve(self, f: PFunction) -> PFunction:
        """f ∗ (Pδ): the words applied in left fields."""
        out = PFunction.zeros(f.spec)
        for word, coeff in self.terms:
            out = out + coeff * apply_word(word, Side.LEFT, f)
        return out

    def left_convolve(self, f: PFunction) -> PFunction:
        """(Pδ) ∗ f: the reversed words applied in right fields."""
        out = PFunction.zeros(f.spec)
        for word, coeff in self.terms:
            out = out + coeff * apply_word(word[::-1], Side.RIGHT, f)
        return out
