class InvalidParameterError(ValueError):
    """A parameter violates its documented range or type."""


class ContractViolationError(RuntimeError):
    """An operation was called on a state it is not defined for."""


class ConfigError(ValueError):
    """A config file or override could not be parsed or validated."""
