"""Exception hierarchy shared across the toolkit."""


class HarqFblError(Exception):
    """Base class for all toolkit errors."""


class DomainError(HarqFblError, ValueError):
    """An argument violates a documented precondition."""


class ConstructionError(HarqFblError):
    """A channel model cannot be built from the given parameters."""


class ResourceLimitError(HarqFblError):
    """A configured enumeration or memory budget would be exceeded."""


class ConfigError(HarqFblError):
    """A run configuration failed to parse or validate."""


class ValidationFailure(HarqFblError):
    """A requested consistency check did not hold."""
