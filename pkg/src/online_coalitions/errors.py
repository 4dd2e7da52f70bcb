"""Exception hierarchy shared by every module of the package."""


class CoalitionError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(CoalitionError, ValueError):
    """An argument lies outside the domain of an operation."""


class InvalidDeviation(DomainError):
    """A deviation does not move its agent to a different coalition."""


class CapacityError(CoalitionError):
    """An enumeration guard was exceeded."""


class ModeError(CoalitionError, ValueError):
    """A worst-case family was used where a distribution is required (or vice versa)."""


class ProtocolViolation(CoalitionError):
    """An online policy returned an illegal placement."""


class PreconditionViolation(CoalitionError):
    """The observed prefix game falls outside the class an algorithm supports."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class ParseError(CoalitionError, ValueError):
    """A file does not conform to the instance/partition JSON schema."""
