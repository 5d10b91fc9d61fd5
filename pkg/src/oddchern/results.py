"""Structured results for degree-type computations."""

from __future__ import annotations

from dataclasses import dataclass, field

from .defaults import DEGREE_IMAG_TOL, DEGREE_RESIDUAL_TOL


@dataclass
class DegreeResult:
    """A normalized integral expected to quantize to an integer."""

    value: complex
    rounded: int
    residual: float
    convergence: list = field(default_factory=list)  # (resolution scale, value)
    converged: bool = True

    @classmethod
    def from_value(cls, value, convergence, converged):
        value = complex(value)
        rounded = int(round(value.real))
        return cls(
            value=value,
            rounded=rounded,
            residual=abs(value - rounded),
            convergence=list(convergence),
            converged=converged,
        )

    @property
    def accepted(self) -> bool:
        imag_ok = abs(self.value.imag) < DEGREE_IMAG_TOL * (1.0 + abs(self.value))
        return self.converged and imag_ok and self.residual < DEGREE_RESIDUAL_TOL
