"""Exception types shared across the package."""


class NulljamError(Exception):
    """Base class for all package errors."""


class DegenerateGeometryError(NulljamError):
    """Raised when points coincide (or a distance is nonpositive) where a
    well-defined direction or path loss is required."""


class InvalidInputError(NulljamError):
    """Raised for malformed numeric input: negative gains, non-monotone
    timestamps, control-bound violations."""


class ScenarioError(NulljamError):
    """Raised when a scenario file fails validation; the message names the
    offending field."""


class SolverError(NulljamError):
    """Raised when a boundary-value solve cannot even be set up (degenerate
    scenario).  Plain non-convergence is reported through the solution's
    ``converged`` flag instead."""
