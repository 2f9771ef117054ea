"""1D Bose-Einstein condensate under localized dissipation.

Ground states of the trapped Gross-Pitaevskii equation, split-step spectral
time evolution with a Gaussian loss profile, and intensity sweeps that locate
the Zeno onset (the intensity beyond which stronger dissipation removes fewer
atoms).
"""

from .errors import (BlowUpError, BoundaryContaminationError, ConvergenceError,
                     InvalidStateError, ParameterError, SimulationError)
from .grid import EnergyComponents, Grid, WaveFunction, density, energy_components, norm
from .potentials import DissipationProfile, TrapPotential, gamma_values, trap_values
from .ground_state import (GroundStateResult, analytic_gaussian_ground_state,
                           gpe_residual, solve_ground_state)
from .evolution import (EvolutionConfig, Trajectory, calibrate_dt, decay_rate_check,
                        evolve, rate_consistency_errors, step)
from .sweep import (CollapseEntry, CollapseReport, LossCurve, collapse_check,
                    critical_gamma, default_gamma_grid, sweep_gamma)

__version__ = "0.1.0"

__all__ = [
    "SimulationError", "ParameterError", "InvalidStateError", "ConvergenceError",
    "BlowUpError", "BoundaryContaminationError",
    "Grid", "WaveFunction", "norm", "density", "energy_components", "EnergyComponents",
    "TrapPotential", "DissipationProfile", "trap_values", "gamma_values",
    "GroundStateResult", "solve_ground_state", "gpe_residual",
    "analytic_gaussian_ground_state",
    "EvolutionConfig", "Trajectory", "step", "evolve", "decay_rate_check",
    "calibrate_dt", "rate_consistency_errors",
    "LossCurve", "CollapseEntry", "CollapseReport", "sweep_gamma", "critical_gamma",
    "collapse_check", "default_gamma_grid",
    "__version__",
]
