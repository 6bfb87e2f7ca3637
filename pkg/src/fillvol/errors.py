"""Exception hierarchy.

Each class carries the CLI exit code it maps to, so the command-line front
end can translate failures without a lookup table.
"""


class FillvolError(Exception):
    exit_code = 4


class ValidationError(FillvolError):
    """Malformed input: a bad word, document, presentation or parameter."""

    exit_code = 2

    def __init__(self, message, path=None, field=None):
        super().__init__(message)
        self.path = path
        self.field = field

    def as_dict(self):
        return {
            "error": type(self).__name__,
            "message": str(self),
            "path": self.path,
            "field": self.field,
        }


class MalformedWordError(ValidationError):
    pass


class ResourceLimitError(FillvolError):
    """A configured cap (ball size, search nodes, enumeration count) was hit."""

    exit_code = 3

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class NonTerminationError(ResourceLimitError):
    """Word reduction exceeded its step budget; the rule set is suspect."""


class InconsistencyError(FillvolError):
    """Internal inconsistency, e.g. a boundary operator with nonzero square."""

    exit_code = 4


class SpecConsistencyError(InconsistencyError):
    pass


class WindowTooSmallError(FillvolError):
    """A computation needed a cell or boundary term outside the window."""

    exit_code = 3


class MapValidationError(InconsistencyError):
    pass
