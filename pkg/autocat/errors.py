# autocat/errors.py


class AutocatError(Exception):
    """Base class for every error raised on purpose by the package."""


class ParameterError(AutocatError, ValueError):
    """A precondition or parameter-regime violation."""


class ConfigError(ParameterError):
    """A run configuration that cannot be parsed or validated."""


class SolverError(AutocatError, RuntimeError):
    """A solver that cannot even start (degenerate input)."""


class ScenarioError(AutocatError):
    """Malformed scenario or infrastructure failure while replaying one."""
