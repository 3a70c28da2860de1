"""Exception hierarchy shared by all modules."""


class HeydeError(Exception):
    """Base class for toolkit errors."""


class StructuralError(HeydeError, ValueError):
    """Objects living on incompatible groups were combined."""


class DomainError(HeydeError, ValueError):
    """An input violates the precondition of an operation."""


class CapacityError(HeydeError):
    """An enumeration would exceed the configured size bound."""


class ValidationError(HeydeError, ValueError):
    """A constructed object failed its numeric validity check."""
