"""Exception types raised across the package."""


class EPLabError(Exception):
    """Base class for all package errors."""


class ConfigurationError(EPLabError, ValueError):
    """Invalid grid, scenario or configuration parameters."""


class PreconditionError(EPLabError, ValueError):
    """Input data violates an operation's precondition (e.g. non-positive density)."""


class NumericError(EPLabError, FloatingPointError):
    """Non-finite values encountered in a field."""


class SolverFailure(EPLabError, RuntimeError):
    """An iterative solver did not converge.

    ``residual`` carries the last residual norm seen before giving up.
    """

    def __init__(self, message, residual=float("nan")):
        super().__init__(message)
        self.residual = residual


class CrossingError(SolverFailure):
    """Lagrangian particles crossed (loss of monotonicity in alpha)."""


class FitError(EPLabError, ValueError):
    """A blow-up rate or vanishing-time fit could not be performed."""


class MissingArtifactError(EPLabError, FileNotFoundError):
    """A run directory does not contain the files a command needs."""
