"""Exception hierarchy.

Input errors map to CLI exit code 2 and numerical failures to exit code 3.
"""


class PolSqueezeError(Exception):
    """Base class for all package errors."""


class InputError(PolSqueezeError, ValueError):
    """Invalid argument, file or configuration."""


class GridTooSmallError(InputError):
    pass


class GridMismatchError(InputError):
    pass


class SpectrumParseError(InputError):
    """Malformed spectrometer file; carries the offending line number."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)


class ConfigError(InputError):
    """Bad configuration file; carries the key and line number when known."""

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        super().__init__(message)


class UnphysicalInputError(InputError):
    pass


class NumericalError(PolSqueezeError, ArithmeticError):
    """The numerics failed even though the inputs were valid."""


class WraparoundError(NumericalError):
    pass
