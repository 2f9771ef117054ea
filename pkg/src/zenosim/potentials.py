"""Harmonic trap and Gaussian electron-beam dissipation profile."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .grid import Grid

# Minimum number of grid points across the beam 1/e half-width. Sampling a
# Gaussian narrower than this aliases and silently weakens the dissipation.
MIN_POINTS_PER_WIDTH = 4


@dataclass(frozen=True)
class TrapPotential:
    """Harmonic confinement V(x) = v_h * x**2."""

    v_h: float

    def __post_init__(self):
        if self.v_h <= 0:
            raise ParameterError(f"trap curvature v_h must be positive, got {self.v_h}")

    def values(self, grid: Grid) -> np.ndarray:
        return self.v_h * grid.x**2

    @property
    def omega(self) -> float:
        """Oscillator frequency sqrt(2 v_h) of the equivalent (1/2) omega^2 x^2 trap."""
        return np.sqrt(2.0 * self.v_h)

    @property
    def oscillator_length(self) -> float:
        return (2.0 * self.v_h) ** -0.25


@dataclass(frozen=True)
class DissipationProfile:
    """Electron beam profile Gamma(x) = gamma * exp(-((x - center)/width)^2).

    gamma is the peak loss intensity (1/time), width the beam 1/e half-width,
    center the impinging point.
    """

    gamma: float
    width: float
    center: float = 0.0

    def __post_init__(self):
        if self.gamma < 0:
            raise ParameterError(f"beam intensity gamma must be >= 0, got {self.gamma}")
        if self.width <= 0:
            raise ParameterError(f"beam width must be positive, got {self.width}")

    def values(self, grid: Grid) -> np.ndarray:
        """Pointwise samples of Gamma on the grid; rejects under-resolved beams."""
        if self.width < MIN_POINTS_PER_WIDTH * grid.dx:
            raise ParameterError(
                f"beam width {self.width} is narrower than {MIN_POINTS_PER_WIDTH} "
                f"grid steps (dx={grid.dx}); refine the grid")
        return self.gamma * np.exp(-(((grid.x - self.center) / self.width) ** 2))


def trap_values(trap: TrapPotential, grid: Grid) -> np.ndarray:
    return trap.values(grid)


def gamma_values(diss: DissipationProfile, grid: Grid) -> np.ndarray:
    return diss.values(grid)
