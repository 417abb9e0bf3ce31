"""Shared pulse envelopes.

All couplings of a bipartite system are scaled by one common envelope; this
shared time dependence is what keeps the decomposition time-independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SHAPES = ("constant", "gaussian", "sin2")


@dataclass(frozen=True)
class EnvelopeSpec:
    """Dimensionless envelope f(t) multiplying the whole coupling block.

    Shapes (times in units of the pulse duration T):
      constant  f = amplitude
      gaussian  f = amplitude * exp(-((t - center) / width)**2)
      sin2      f = amplitude * sin(pi (t - center + width) / (2 width))**2
                on [center - width, center + width], zero outside
    """

    shape: str = "constant"
    amplitude: float = 1.0
    center: float = 0.0
    width: float = 1.0

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValueError(f"unknown envelope shape {self.shape!r}, expected one of {SHAPES}")
        if self.shape != "constant" and not self.width > 0:
            raise ValueError("width must be positive for shaped pulses")

    def value(self, t: float) -> float:
        if self.shape == "constant":
            return self.amplitude
        if self.shape == "gaussian":
            return self.amplitude * float(np.exp(-(((t - self.center) / self.width) ** 2)))
        x = t - self.center
        if abs(x) >= self.width:
            return 0.0
        return self.amplitude * float(np.sin(np.pi * (x + self.width) / (2 * self.width)) ** 2)

    @property
    def peak(self) -> float:
        return self.amplitude

    def __call__(self, t: float) -> float:
        return self.value(t)
