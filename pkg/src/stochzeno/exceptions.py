"""Exception types raised by stochzeno."""


class ValidationError(ValueError):
    """Invalid input value (bad probability, negative duration, non-Hermitian matrix...)."""


class DegenerateLawError(ValueError):
    """The bimodal law cannot be inverted because both atoms give the same q."""


class ConfigError(ValueError):
    """Malformed or unrecognized experiment configuration."""

    def __init__(self, message, field=None):
        self.field = field
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)
