"""Physical parameter bundle.

Units follow the convention hbar = 2m = 1 with Poisson prefactor 4*pi, so
the kinetic symbol is |G|^2 and all of beta, mu, kappa0 are dimensionless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class PhysParams:
    """Inverse temperature, chemical potential and mean background density.

    Attributes
    ----------
    beta : float
        Inverse temperature, strictly positive (finite-temperature theory).
    mu : float
        Chemical potential of the homogeneous reference problem.
    kappa0 : float
        Expected spatial average of the background charge, strictly positive.
    """

    beta: float
    mu: float
    kappa0: float

    def __post_init__(self):
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ValueError(f"beta must be positive and finite, got {self.beta}")
        if not (self.kappa0 > 0 and math.isfinite(self.kappa0)):
            raise ValueError(f"kappa0 must be positive and finite, got {self.kappa0}")
        if not math.isfinite(self.mu):
            raise ValueError(f"mu must be finite, got {self.mu}")

    @property
    def m_star(self) -> float:
        """Coercivity scale min(mu, sqrt(mu)); requires mu > 0."""
        if self.mu <= 0:
            raise ValueError("m_star is defined for mu > 0 only")
        return min(self.mu, math.sqrt(self.mu))
