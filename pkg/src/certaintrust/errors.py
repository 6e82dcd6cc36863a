"""Exception taxonomy shared across the package.

Every domain failure derives from :class:`TrustError` so callers (and the
CLI exit-code mapping) can distinguish domain errors from storage errors
and plain usage mistakes.
"""


class TrustError(Exception):
    """Base class for all domain errors raised by this package."""


class EvidenceExceedsCap(TrustError):
    """Total evidence r+s exceeds the configured maximum N."""


class DegenerateBase(TrustError):
    """An operator denominator built from initial expectations is ~0."""


class ZeroBase(TrustError):
    """Behavioral probability is undefined for a zero base expectation."""


class InvalidDomain(TrustError):
    """A variable domain or sampling request is empty or inverted."""


class ArityMismatch(TrustError):
    """Input vector length does not match the rulebase arity."""


class IndexOutOfRange(TrustError):
    """A rulebase input index is out of range or duplicated."""


class EmptyAggregate(TrustError):
    """Aggregated membership has no mass; centroid is undefined."""


class MissingVariable(TrustError):
    """One or more pipeline variables could not be resolved."""


class UnknownVariable(TrustError):
    """A variable name is not one of the configured pipeline variables."""


class StorageFailure(TrustError):
    """The evidence log could not be read or written."""
