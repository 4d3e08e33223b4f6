"""Exception hierarchy shared by all modules."""


class RsolabError(Exception):
    """Base class for every error raised by this package."""


class DomainError(RsolabError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PreconditionError(RsolabError, ValueError):
    """A documented precondition of an operation is violated."""


class SizeError(RsolabError, ValueError):
    """A problem exceeds a configured size guard."""


class ThresholdDegeneracyError(RsolabError, ValueError):
    """A counting threshold coincides with an eigenvalue; perturb eps."""


class InsufficientRangeError(RsolabError, ValueError):
    """Too few usable points to fit a decay profile."""


class ConvergenceError(RsolabError, RuntimeError):
    """An iterative solver did not reach its tolerance."""

    def __init__(self, message, best_residuals=None):
        super().__init__(message)
        self.best_residuals = best_residuals


class FactorizationError(RsolabError, RuntimeError):
    """LDL^T breakdown that could not be repaired by shift jitter."""


class ConditioningError(RsolabError, RuntimeError):
    """Every Monte Carlo realization was rejected by the conditioning event."""


class ConfigError(RsolabError, ValueError):
    """Invalid or unknown configuration entry."""


class IntegrityError(RsolabError):
    """Persisted run files are missing or do not match their recorded hashes."""


class SchemaError(RsolabError, ValueError):
    """A persisted table does not follow its documented schema."""


class RunNotFoundError(IntegrityError, FileNotFoundError):
    """No persisted run exists at the given location."""
