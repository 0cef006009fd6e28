"""Exception types shared across the package."""


class TrigraphError(Exception):
    """Base class for all package-specific errors."""


class RecordParseError(TrigraphError):
    """A record or truth line could not be parsed; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DuplicateKeyError(TrigraphError):
    """A document key appeared more than once."""


class NameNotFoundError(TrigraphError):
    """The requested name reference occurs in no record."""


class ConfigError(TrigraphError):
    """A parameter or configuration value is outside its legal range."""


class EmptyNetworkError(TrigraphError):
    """An operation needed at least one edge but the network has none."""


class DivergenceError(TrigraphError):
    """Training produced a non-finite embedding entry."""


class UndefinedTestError(TrigraphError):
    """A statistical test is undefined for the given input (e.g. zero variance)."""
