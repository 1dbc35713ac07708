"""Exception hierarchy shared by all pemnet modules."""


class PemnetError(Exception):
    """Base class for all pemnet errors."""


class ConfigurationError(PemnetError, ValueError):
    """A parameter or configuration value is invalid or infeasible."""


class StabilityError(PemnetError):
    """A dynamical system or linear solve violates its stability requirement."""


class NumericalError(PemnetError):
    """A numerical computation failed (overflow, singular system, rank deficiency)."""


class ConvergenceError(NumericalError):
    """An iterative computation exceeded its iteration budget."""


class DataError(PemnetError):
    """Input data is degenerate or insufficient for the requested computation."""


class NilpotentGraphError(PemnetError):
    """The graph has a nilpotent adjacency matrix; callers usually resample."""


class FileFormatError(PemnetError):
    """A serialized input file does not match its expected format."""
