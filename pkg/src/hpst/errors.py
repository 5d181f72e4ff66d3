"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class NumericalError(ArithmeticError):
    """A numerical procedure failed (non-convergence, singular system)."""


class ConfigError(ValueError):
    """An experiment configuration is unreadable or violates the schema."""
