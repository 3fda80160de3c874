class NumericalFailure(ArithmeticError):
    """A numerical procedure failed to meet its accuracy contract."""


class ConfigError(ValueError):
    """Invalid configuration value or key."""
