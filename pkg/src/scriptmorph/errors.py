"""Shared exception hierarchy.

Every domain error raised by this package derives from ScriptMorphError so
callers (and the CLI) can distinguish expected failures from bugs.
"""


class ScriptMorphError(Exception):
    """Base class for all domain errors."""


class ConfigError(ScriptMorphError):
    """Invalid or incomplete run configuration."""
