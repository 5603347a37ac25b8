"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration or parameter value."""


class ParseError(ConfigError):
    """Malformed input file; message carries path and line number."""

    def __init__(self, path, lineno: int, message: str):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = str(path)
        self.lineno = lineno


class IntegrityError(ValueError):
    """A referential or structural invariant is violated."""


class CapacityError(ValueError):
    """Requested space exceeds a hard capacity limit."""


class AnalysisError(ValueError):
    """An analysis precondition is not met."""


class FitError(AnalysisError):
    """Data too degenerate or inconsistent for a model fit."""
