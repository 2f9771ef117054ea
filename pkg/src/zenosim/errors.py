"""Exception hierarchy shared by all simulation modules."""


class SimulationError(Exception):
    """Base class for all zenosim errors."""


class ParameterError(SimulationError):
    """A configuration value is outside its validity range."""


class InvalidStateError(SimulationError):
    """A wave function violates a state precondition (non-finite, unnormalized)."""


class ConvergenceError(SimulationError):
    """The stationary-state solver did not reach the requested tolerance."""

    def __init__(self, message, residual, iterations):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class BlowUpError(SimulationError):
    """Time integration produced non-finite amplitudes."""

    def __init__(self, message, step):
        super().__init__(message)
        self.step = step


class BoundaryContaminationError(SimulationError):
    """Density at the box edge exceeded its tolerance during a run."""

    def __init__(self, message, time, edge_density):
        super().__init__(message)
        self.time = time
        self.edge_density = edge_density
