"""Model parameters for chaos measures driven by the kernel ln(T/|x-y|)."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError


@dataclass(frozen=True)
class ModelParams:
    """Dimension, intermittency and kernel scale of the model.

    d      -- spatial dimension (>= 1)
    gamma  -- intermittency; the subcritical regime 0 < gamma < sqrt(2d)
              is required, gamma = 0 is accepted as the degenerate
              deterministic case (unit weights, infinite b and q)
    T      -- kernel scale in ln(T/|x-y|), must be positive

    Derived quantities:

    b = 1/2 + d/gamma^2   (drift exponent of the Laplace-side estimates)
    q = 2d/gamma^2        (positive-moment blow-up order of the total mass)
    """

    d: int
    gamma: float
    T: float

    def __post_init__(self) -> None:
        if int(self.d) != self.d or self.d < 1:
            raise ParameterError(f"dimension must be a positive integer, got {self.d}")
        object.__setattr__(self, "d", int(self.d))
        if not (0 <= self.gamma < math.sqrt(2 * self.d)):
            raise ParameterError(
                f"gamma={self.gamma} outside the subcritical range [0, sqrt(2d)) "
                f"for d={self.d}"
            )
        if not self.T > 0:
            raise ParameterError(f"kernel scale T must be positive, got {self.T}")

    @property
    def b(self) -> float:
        if self.gamma == 0:
            return math.inf
        return 0.5 + self.d / self.gamma**2

    @property
    def q(self) -> float:
        if self.gamma == 0:
            return math.inf
        return 2.0 * self.d / self.gamma**2

    def to_dict(self) -> dict:
        return {"d": self.d, "gamma": self.gamma, "T": self.T}

    @classmethod
    def from_dict(cls, data: dict) -> "ModelParams":
        return cls(d=data["d"], gamma=data["gamma"], T=data["T"])
