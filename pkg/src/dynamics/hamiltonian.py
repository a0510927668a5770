"""Hamiltonians of the p-mechanical equation of motion."""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from ..grid.gridfn import GridSpec, PFunction
from ..group.heisenberg import FieldPolynomial

logger = logging.getLogger(__name__)

MAX_DEGREE = 4


class DynamicsError(Exception):
    """Base exception for dynamics errors."""
    pass


class HamiltonianKind(str, Enum):
    CONVOLUTION_KERNEL = "convolution_kernel"
    DIFFERENTIAL_OPERATOR = "differential_operator"


@dataclass(frozen=True, eq=False)
class HamiltonianSpec:
    """
    Either a sampled kernel H(s, x, y) or a δ-derivative kernel P(X, Y, S)δ.

    The differential form is never sampled; it acts through invariant fields.
    """

    kind: HamiltonianKind
    kernel: Optional[PFunction] = None
    polynomial: Optional[FieldPolynomial] = None

    def __post_init__(self):
        kind = HamiltonianKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind == HamiltonianKind.CONVOLUTION_KERNEL:
            if self.kernel is None:
                raise DynamicsError("A convolution Hamiltonian needs a kernel")
            self.kernel.admit()
        else:
            if self.polynomial is None:
                raise DynamicsError("A differential Hamiltonian needs a field polynomial")
            if self.polynomial.degree > MAX_DEGREE:
                raise DynamicsError(
                    f"Field polynomial degree {self.polynomial.degree} exceeds {MAX_DEGREE}"
                )

    @classmethod
    def from_kernel(cls, kernel: PFunction) -> "HamiltonianSpec":
        return cls(HamiltonianKind.CONVOLUTION_KERNEL, kernel=kernel)

    @classmethod
    def from_polynomial(cls, polynomial: FieldPolynomial) -> "HamiltonianSpec":
        return cls(HamiltonianKind.DIFFERENTIAL_OPERATOR, polynomial=polynomial)

    @classmethod
    def zero(cls, spec: GridSpec) -> "HamiltonianSpec":
        return cls.from_kernel(PFunction.zeros(spec))

    @property
    def is_kernel(self) -> bool:
        return self.kind == HamiltonianKind.CONVOLUTION_KERNEL

    @property
    def oscillator_scale(self) -> Optional[float]:
        """c when the polynomial is c·(XX + YY), otherwise None."""
        if self.is_kernel:
            return None
        terms = {w: c for w, c in self.polynomial.as_dict().items() if c != 0.0}
        if set(terms) == {"XX", "YY"} and terms["XX"] == terms["YY"]:
            return terms["XX"]
        return None

    def advection_speed(self, spec: GridSpec) -> float:
        """Largest transport speed of the second-order part on the grid, 0 for kernels."""
        if self.is_kernel:
            return 0.0
        weight = max((abs(c) for w, c in self.polynomial.terms if len(w) == 2), default=0.0)
        return 2.0 * weight * float(np.hypot(spec.L_x, spec.L_y))
