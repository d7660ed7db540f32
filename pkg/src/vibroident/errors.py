"""Exception types shared across the toolkit.

Grouped by pipeline stage so the CLI can map them onto exit codes:
config (2), parse (3), numeric (4), io (5).
"""


class VibroidentError(Exception):
    """Base class for all toolkit errors."""


# --- configuration ---------------------------------------------------------

class ConfigError(VibroidentError):
    pass


# --- ingestion / parsing ---------------------------------------------------

class ParseError(VibroidentError):
    """Malformed cell or structure in an input file; carries row index."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class SpacingError(ParseError):
    """Timestamps are not uniformly spaced within tolerance."""


class AlignmentError(VibroidentError):
    """Streams do not overlap enough to synchronize."""


class WindowError(VibroidentError):
    """Requested time window selects no usable samples."""


# --- numerics --------------------------------------------------------------

class NumericError(VibroidentError):
    pass


class AssemblyError(NumericError):
    """Assembled stiffness is singular (mechanism detected)."""


class EigenError(NumericError):
    pass


class SolveError(NumericError):
    """Dynamic matrix is singular at the requested frequency."""


class IntegrationError(NumericError):
    """Time stepping produced unstable growth."""


class DesignError(NumericError):
    """Filter design request is infeasible (e.g. corner above Nyquist)."""


class FilterError(NumericError):
    """Series too short for zero-phase filtering."""


class FitError(NumericError):
    """Sine fit failed to converge; carries the best fit found so far."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class DomainError(NumericError):
    """Argument outside the mathematical domain of a correlation/formula."""


class ForceEstimationError(NumericError):
    pass


class BuildError(NumericError):
    """Frequency response curve construction failed (missing force, ...)."""


class RankError(NumericError):
    """Rigid-body fit is rank deficient; names the unobservable direction."""

    def __init__(self, message, direction=None):
        super().__init__(message)
        self.direction = direction


class NormalizationError(NumericError):
    pass


class ComparisonError(NumericError):
    pass


class GeometryError(NumericError):
    pass


class InfinityError(NumericError):
    """Undamped amplification requested exactly at resonance."""
