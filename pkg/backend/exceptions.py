"""Errors raised by convlint itself.

Each error is keyed and parameterized the same way as the exception values the
diagnostics core models, and renders its message through a template catalog.
"""

from typing import Any, Dict, Optional, Sequence

ERROR_TEMPLATES: Dict[str, str] = {
    "ConfigError": "Invalid value for configuration field {0}: {1}",
    "PatternSyntaxError": 'Malformed pattern "{0}": {1}',
    "UnboundVariable": "Constraint references unbound capture variable {0}",
    "PARSE": "Syntax error: expected {0} but found {1}",
    "TraceError": "Invalid trace file {0}: {1}",
    "UsageError": "{0}",
}


class ConvlintError(Exception):
    """Base class for all convlint errors: a message key, positional parameters and a cause"""

    def __init__(self, key: str, params: Sequence[Any] = (), cause: Optional[BaseException] = None):
        self.key = key
        self.params = tuple(str(p) for p in params)
        self.cause = cause
        super().__init__(key, *self.params)
        if cause is not None:
            self.__cause__ = cause

    @property
    def message(self) -> str:
        from diagnostics import ExcValue, MessageCatalog, render_message

        return render_message(MessageCatalog(ERROR_TEMPLATES), ExcValue(self.key, self.params))

    def __str__(self) -> str:
        return self.message


class ConfigError(ConvlintError):
    def __init__(self, field: str, reason: str, cause: Optional[BaseException] = None):
        self.field = field
        super().__init__("ConfigError", (field, reason), cause)


class PatternSyntaxError(ConvlintError):
    def __init__(self, pattern: str, reason: str):
        self.pattern = pattern
        super().__init__("PatternSyntaxError", (pattern, reason))


class UnboundVariable(ConvlintError):
    def __init__(self, variable: str):
        self.variable = variable
        super().__init__("UnboundVariable", (variable,))


class MiniJSyntaxError(ConvlintError):
    """A token sequence outside the MiniJ grammar"""

    def __init__(self, location, expected: str, found: str):
        self.location = location
        self.expected = expected
        self.found = found
        super().__init__("PARSE", (expected, found))


class TraceError(ConvlintError):
    def __init__(self, path: str, reason: str, cause: Optional[BaseException] = None):
        super().__init__("TraceError", (path, reason), cause)


class UsageError(ConvlintError):
    def __init__(self, reason: str):
        super().__init__("UsageError", (reason,))
