"""Exception types shared across the package."""


class CompoflowError(Exception):
    """Base class for all package-specific errors."""


class DomainError(CompoflowError, ValueError):
    """An argument lies outside the mathematically admissible domain."""


class SingularBranchError(DomainError):
    """The requested coefficient branch hits a vanishing denominator."""


class ScheduleError(CompoflowError, ValueError):
    """A composition schedule violates the order-raising conditions."""


class StepFailureError(CompoflowError, RuntimeError):
    """A single time step could not be completed."""

    def __init__(self, message, step_index=None, residual=None):
        super().__init__(message)
        self.step_index = step_index
        self.residual = residual


class NewtonConvergenceError(StepFailureError):
    """Newton iteration exhausted its iteration budget."""


class LinearSolveError(StepFailureError):
    """A linear system arising inside a step was singular or unusable."""


class AssemblyError(CompoflowError, RuntimeError):
    """Finite element assembly failed (e.g. degenerate element)."""


class ConfigError(CompoflowError, ValueError):
    """Invalid experiment configuration."""
