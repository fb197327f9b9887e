class ModelError(ValueError):
    """Base class for every failure raised by the inference code."""


class DomainError(ModelError):
    pass


class ConfigError(ModelError):
    """Invalid model, data or output configuration (CLI exit code 2)."""


class PreconditionError(ModelError):
    """An operation was called outside the region where it is defined."""


class NumericalError(ArithmeticError):
    """Bracketing or quadrature failed (CLI exit code 3)."""
