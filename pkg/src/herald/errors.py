"""Exception types raised across the package."""


class HeraldError(Exception):
    """Base class for all package errors."""


class DomainError(HeraldError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class GenerationExhausted(HeraldError):
    """Random instance generation could not satisfy the coverage constraint."""


class ConstraintExhausted(HeraldError):
    """Constrained matching could not find a valid matching within the attempt cap."""


class Uncoverable(HeraldError):
    """Some required task is contained in no available matching pair."""


class Irreplaceable(HeraldError):
    """A winning pair's subset cannot be re-covered by pairs of other workers."""


class SizeLimit(HeraldError):
    """Brute-force enumeration was asked to handle too many pairs."""


class EnumTooLarge(HeraldError):
    """An exact enumeration would exceed its configured cap."""


class UnknownCase(HeraldError, KeyError):
    """No golden case is registered under the requested name."""
