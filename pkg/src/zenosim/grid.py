"""Uniform periodic 1D grid, complex field storage, quadrature and spectral derivatives.

Units: m = hbar = 1 throughout, so lengths, times and energies are
dimensionless and wavenumbers coincide with velocities.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, TYPE_CHECKING

import numpy as np
import scipy.fft as sfft

from .errors import InvalidStateError, ParameterError

if TYPE_CHECKING:
    from .potentials import TrapPotential

NORM_PRECONDITION_TOL = 1e-6


class Grid:
    """Uniform grid on [-L, L) with the wavenumbers of the periodic Fourier transform.

    x[i] = -L + i*dx with dx = 2L/n, so x is symmetric about 0 except for
    the unpaired left endpoint. n must be even so that max|k| = pi/dx holds
    exactly; powers of two give the fastest transforms.
    """

    def __init__(self, half_width: float, n_points: int):
        if half_width <= 0:
            raise ParameterError(f"half_width must be positive, got {half_width}")
        if n_points < 16:
            raise ParameterError(f"n_points must be >= 16, got {n_points}")
        if n_points % 2:
            raise ParameterError(f"n_points must be even, got {n_points}")
        self.half_width = float(half_width)
        self.n_points = int(n_points)
        self.dx = 2.0 * self.half_width / self.n_points
        self.x = -self.half_width + self.dx * np.arange(self.n_points)
        self.k = 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)
        self.x.setflags(write=False)
        self.k.setflags(write=False)

    def __eq__(self, other):
        return (isinstance(other, Grid)
                and self.half_width == other.half_width
                and self.n_points == other.n_points)

    def __hash__(self):
        return hash((self.half_width, self.n_points))

    def __repr__(self):
        return f"Grid(half_width={self.half_width}, n_points={self.n_points})"


@dataclass
class WaveFunction:
    """Complex field psi on a grid; amplitudes carry units of length^(-1/2)."""

    grid: Grid
    psi: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.psi = np.ascontiguousarray(self.psi, dtype=np.complex128)
        if self.psi.shape != (self.grid.n_points,):
            raise ParameterError(
                f"amplitude array has shape {self.psi.shape}, "
                f"expected ({self.grid.n_points},)")

    def copy(self) -> "WaveFunction":
        return WaveFunction(self.grid, self.psi.copy())


def _require_finite(psi: WaveFunction):
    if not np.all(np.isfinite(psi.psi.view(np.float64))):
        raise InvalidStateError("wave function contains non-finite amplitudes")


def norm(psi: WaveFunction) -> float:
    """Riemann-sum quadrature of |psi|^2 over the box."""
    _require_finite(psi)
    a = psi.psi
    return float(np.sum(a.real**2 + a.imag**2) * psi.grid.dx)


def density(psi: WaveFunction) -> np.ndarray:
    """Pointwise density rho[i] = |psi[i]|^2."""
    _require_finite(psi)
    a = psi.psi
    return a.real**2 + a.imag**2


def spectral_derivative(grid: Grid, f: np.ndarray, order: int = 1) -> np.ndarray:
    """Periodic spectral derivative (ik)^order of a sampled field."""
    return sfft.ifft((1j * grid.k) ** order * sfft.fft(f))


def energy_components(psi: WaveFunction, g: float, trap: "TrapPotential") -> "EnergyComponents":
    """Kinetic, trap and interaction energies of a unit-norm state.

    E_kin = (1/2) int |dpsi/dx|^2, E_trap = int V |psi|^2,
    E_int = (g/2) int |psi|^4, all by Riemann quadrature.
    """
    n = norm(psi)
    if abs(n - 1.0) > NORM_PRECONDITION_TOL:
        raise InvalidStateError(
            f"energy_components requires a unit-norm state, got norm {n!r}")
    grid = psi.grid
    dpsi = spectral_derivative(grid, psi.psi)
    rho = density(psi)
    e_kin = 0.5 * float(np.sum(dpsi.real**2 + dpsi.imag**2)) * grid.dx
    e_trap = float(np.sum(trap.values(grid) * rho)) * grid.dx
    e_int = 0.5 * g * float(np.sum(rho * rho)) * grid.dx
    return EnergyComponents(e_kin, e_trap, e_int)


class EnergyComponents(NamedTuple):
    kinetic: float
    trap: float
    interaction: float

    @property
    def total(self) -> float:
        return self.kinetic + self.trap + self.interaction

    @property
    def virial(self) -> float:
        """2*E_kin - 2*E_trap + E_int; zero at a stationary state."""
        return 2.0 * self.kinetic - 2.0 * self.trap + self.interaction
