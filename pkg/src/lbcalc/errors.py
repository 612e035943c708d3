"""Exception taxonomy shared by every module.

Validation errors flag malformed values (wrong shapes, non-finite entries,
bad schemas).  Domain errors flag violated mathematical preconditions; their
messages quote the offending quantity so a caller can report it verbatim.
Internal check errors cover certified post-conditions that are supposed to be
unreachable; if one fires there is a bug, not a bad input.
"""


class LbcalcError(Exception):
    """Base class for everything raised on purpose by this package."""


class ValidationError(LbcalcError):
    """A value does not parse or is structurally malformed."""


class DomainError(LbcalcError):
    """A mathematical precondition does not hold for the given input."""


class ConfigurationError(LbcalcError):
    """A component was wired up with pieces that do not fit together."""


class InternalCheckError(LbcalcError):
    """A certified internal consistency check failed.  Must never fire."""


class UsageError(LbcalcError):
    """Command line was malformed (unknown verb, bad flag, missing input)."""
