"""Exception hierarchy shared by every module in the package.

All domain failures derive from :class:`LinSysIdError` so callers (CLI,
service) can distinguish "bad input / bad data" from programming errors.
"""


class LinSysIdError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(LinSysIdError):
    """Array shapes are inconsistent with each other or with the system."""


class NotSymmetric(LinSysIdError):
    """A matrix that must be symmetric is not, beyond tolerance."""


class NotPositiveDefinite(LinSysIdError):
    """A matrix that must be positive definite failed factorization."""


class EmptyDataset(LinSysIdError):
    """A dataset with zero samples was supplied where data is required."""


class SingularGram(LinSysIdError):
    """The unregularized regressor Gram matrix is numerically singular."""


class PreconditionViolated(LinSysIdError):
    """An operation's mathematical precondition does not hold."""


class ConfigInvalid(LinSysIdError):
    """An experiment configuration file or mapping is malformed."""
