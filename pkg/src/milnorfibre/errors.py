"""Exception hierarchy shared by the library and the CLI."""


class MilnorFibreError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(MilnorFibreError, ValueError):
    """Matrix shapes do not fit together."""


class ParseError(MilnorFibreError):
    """The input document does not follow the diagram schema.

    ``where`` is a field path such as ``branches[1].genus`` or a
    ``line N, column M`` location for syntax errors.
    """

    def __init__(self, message, where=None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


class DiagramValidationError(MilnorFibreError):
    """Raised with every problem found in a diagram, not just the first."""

    def __init__(self, errors):
        self.errors = list(errors)
        lines = "\n".join(f"  - {e}" for e in self.errors)
        super().__init__(f"diagram failed validation ({len(self.errors)} error(s)):\n{lines}")


class DataMissingError(MilnorFibreError):
    """An optional field needed by a requested computation is absent."""

    def __init__(self, message, missing=()):
        self.missing = list(missing)
        if self.missing:
            message = f"{message}: " + ", ".join(self.missing)
        super().__init__(message)


class CoverageError(MilnorFibreError):
    """A chosen set of special points does not meet every branch."""

    def __init__(self, uncovered):
        self.uncovered = list(uncovered)
        super().__init__("special-point set does not cover branch(es): " + ", ".join(self.uncovered))


class InconsistentDataError(MilnorFibreError):
    """Two derived facts contradict each other, so the input data is wrong."""
