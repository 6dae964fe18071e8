"""Exception types shared across the package."""


class GazecoopError(Exception):
    """Base class for all package errors."""


class FrameMismatchError(GazecoopError):
    """A transform chain or ray/plane pairing references inconsistent frames."""


class DegenerateRayError(GazecoopError):
    """A gaze ray could not be built (zero-length direction)."""


class InsufficientDataError(GazecoopError):
    """Too few samples for the requested fit or statistic."""


class DegenerateDesignError(GazecoopError):
    """Regression design matrix is rank-deficient (e.g. constant regressor)."""


class SeparationError(GazecoopError):
    """Logistic classes are perfectly separable; coefficients diverge."""


class InvalidModelError(GazecoopError):
    """Model coefficients do not admit the requested quantity."""


class ConfigError(GazecoopError):
    """A configuration value violates a documented constraint."""


class UnknownSessionError(GazecoopError):
    """Referenced live session id does not exist or was closed."""
