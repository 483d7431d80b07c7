"""Exception types shared across the pipeline.

The CLI maps these onto exit codes: missing inputs are exit 2, every
other (schema, parse, validation) failure is exit 3.
"""


class ShotmemError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(ShotmemError):
    """A file or field could not be parsed.

    Carries optional location context so messages can name the exact
    row/column that failed.
    """

    def __init__(self, message, *, path=None, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        loc = []
        if path is not None:
            loc.append(str(path))
        if line is not None:
            loc.append(f"line {line}")
        if column is not None:
            loc.append(f"column {column!r}")
        if loc:
            message = f"{': '.join(loc)}: {message}"
        super().__init__(message)


class SchemaError(ShotmemError):
    """A file header does not match the expected schema."""


class ValidationError(ShotmemError):
    """Parsed data violates a structural invariant."""


class DimensionMismatchError(ValidationError):
    """Two sides of an operation disagree on vector dimensionality."""

    def __init__(self, expected, got, context=""):
        self.expected = expected
        self.got = got
        prefix = f"{context}: " if context else ""
        super().__init__(f"{prefix}dimension mismatch: expected {expected}, got {got}")


class StageInputError(ShotmemError):
    """A pipeline stage is missing one of its input files."""


class OutputExistsError(ShotmemError):
    """A stage would overwrite an existing artifact without --force."""
