"""Exception hierarchy.

Each exception carries the process exit code the command-line front end
uses when the error escapes a command.
"""


class WaveletError(Exception):
    exit_code = 1


class ParseError(WaveletError, ValueError):
    exit_code = 2

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{where}: {message}"
        super().__init__(message)


class FieldMismatch(WaveletError, ValueError):
    exit_code = 2


class CharacteristicViolation(WaveletError):
    """An order n >= p was requested in characteristic p."""

    exit_code = 3


class PrecisionExhausted(WaveletError, ArithmeticError):
    exit_code = 4


class UnsupportedDegree(WaveletError):
    exit_code = 2


class BudgetExceeded(WaveletError):
    exit_code = 2


class NoConvergence(WaveletError):
    exit_code = 4
