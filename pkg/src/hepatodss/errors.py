"""Exception hierarchy shared across the package.

Everything user-facing derives from DataError so the CLI and HTTP layer can
map problems in supplied data to one exit code / status family without
catching bare Exception.
"""


class DataError(Exception):
    """A problem in user-supplied data (files, rules, queries, requests)."""


class LiteralError(DataError):
    """Literal lexical form does not parse under its declared datatype."""


class NTriplesParseError(DataError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class CsvSchemaError(DataError):
    """Input CSV is missing a required column."""


class CsvRowError(DataError):
    """A CSV row holds a value that cannot be interpreted."""


class EncodingError(DataError):
    """Unknown category or sex label during record encoding."""


class ImputationError(DataError):
    """A lab column has no observed values to average."""


class RuleParseError(DataError):
    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)
        self.position = position


class RuleEvalError(DataError):
    """A rule body could not be evaluated (e.g. non-numeric builtin input)."""


class QueryParseError(DataError):
    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)
        self.position = position


class QueryTypeError(DataError):
    """A filter was applied to a binding that is not numeric."""


class SchemaError(DataError):
    """Ontology schema file is malformed or inconsistent."""


class ReportConflictError(DataError):
    """A test report contains contradictory duplicate entries."""


class SessionStateError(DataError):
    """An operation was attempted in the wrong session state."""


class PreconditionError(DataError):
    """Operation precondition violated (e.g. planning without an RNA result)."""
