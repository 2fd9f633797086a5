"""Exception types shared across qlink.

The CLI maps every :class:`InputError` to exit status 2 and every
:class:`ConvergenceError` to exit status 3.
"""


class QlinkError(Exception):
    """Base class for all qlink errors."""


class InputError(QlinkError):
    """Bad user input: unparseable text, invalid values, unknown names."""


class UnitError(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class DomainError(InputError):
    """A formula was asked to evaluate outside its range of validity."""


class ValidationError(InputError):
    pass


class CatalogError(InputError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class SpectrumFormatError(ValidationError):
    def __init__(self, message, line):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ConvergenceError(QlinkError):
    """Numerical integration failed to reach the requested tolerance."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
