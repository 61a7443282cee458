"""Exception types shared across the package."""


class BiphotonError(Exception):
    """Base class for all package-specific errors."""


class ParseError(BiphotonError):
    """An input file or config does not match its expected format."""


class ValidationError(BiphotonError):
    """A state or input failed a physicality check."""


class DegenerateInputError(BiphotonError):
    """Input is formally valid but carries no usable information
    (e.g. all-zero counts, zero coincidence rates)."""


class ConfigError(BiphotonError):
    """A run configuration or measurement setup is unusable
    (missing keys, singular projector set, bad grids)."""


class ConvergenceError(BiphotonError):
    """The likelihood optimizer did not converge.

    Carries the best state found so far and the final simplex spread so
    callers can inspect or accept the partial result.
    """

    def __init__(self, message, best_state=None, simplex_size=None):
        super().__init__(message)
        self.best_state = best_state
        self.simplex_size = simplex_size
