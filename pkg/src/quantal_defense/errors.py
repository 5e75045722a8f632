"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class PreconditionError(ValueError):
    """Inputs are valid but do not satisfy the hypothesis an operation needs."""


class ConfigError(ValueError):
    """Invalid sweep or CLI configuration.

    ``path`` names the offending field (e.g. ``"lambda_values[3]"``).
    """

    def __init__(self, message, path=None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class ValidationWarning(UserWarning):
    """Non-fatal model validation issue (e.g. attack curve above 1)."""
