class DomainError(ValueError):
    """An argument violates a precondition of the operation."""


class RangeError(DomainError):
    """An argument is outside the supported numeric range."""


class UnsupportedModulusError(DomainError):
    """A modulus has a prime factor beyond the sieved resolution."""


class InvariantError(RuntimeError):
    """An internal consistency check failed."""
