"""Exception and warning types shared across the package."""


class NonFinitePath(RuntimeError):
    """A simulated state overflowed the guard threshold (step size too large
    for the drift, or a runaway field)."""

    def __init__(self, message, path_index=None):
        super().__init__(message)
        self.path_index = path_index


class InsufficientPaths(ValueError):
    """Fewer paths than required for a standard-error estimate."""


class DegeneratePath(ValueError):
    """Path carries no displacement information (constant states)."""


class DerivativeUnavailable(ValueError):
    """Analytic derivative requested but none was supplied."""


class OrderOutOfRange(ValueError):
    """Polynomial order outside the supported range."""


class SeriesDivergence(ValueError):
    """Elapsed time outside the convergence region of the eigenfunction series."""


class TruncationWarning(UserWarning):
    """Last retained series term is large enough to matter; carries its magnitude."""


class AnchorTooCloseToBoundary(ValueError):
    """Initial-profile center too close to the grid edge for the requested width."""


class MassDriftError(RuntimeError):
    """Probability mass drifted beyond tolerance during a forward solve."""


class InstabilityError(RuntimeError):
    """Non-finite values appeared during a PDE solve."""


class InsufficientSnapshots(ValueError):
    """Too few time snapshots for a centered time derivative."""


class PathTooShort(ValueError):
    """Path horizon shorter than required for a time-average estimate."""


class GateTooNarrow(RuntimeError):
    """Too few paths survive the conditioning gate."""


class NonPositiveDensity(ValueError):
    """Density not strictly positive on the evaluation set."""


class TimeRegression(ValueError):
    """Measurement time precedes the current conditioning anchor."""


class UsageError(ValueError):
    """Invalid command-line request; message names the offending flag."""
