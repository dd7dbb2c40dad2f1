"""Exception types shared across the package."""


class HashvaultError(Exception):
    """Base class for all domain errors raised by this package."""


class ParameterError(HashvaultError, ValueError):
    """An argument is outside its documented range or shape."""


class FormatError(HashvaultError, ValueError):
    """A file or record string does not parse or fails its checksum."""


class DuplicateUserError(HashvaultError):
    """Enrollment attempted for a username already present."""


class VerificationError(HashvaultError):
    """A password check failed where success was required (e.g. migration)."""


class SchemeMismatchError(HashvaultError):
    """An attack was pointed at a dump its tooling cannot apply to."""


class MemoryBudgetError(HashvaultError):
    """A memory-hard derivation would exceed the configured allocation cap."""
