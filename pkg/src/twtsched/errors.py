class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""


class InvariantError(RuntimeError):
    """A simulation invariant was violated; the replication is aborted."""
