"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument violates a documented precondition."""


class PrecisionError(ArithmeticError):
    """A numerically computed certificate failed its rigor check."""
