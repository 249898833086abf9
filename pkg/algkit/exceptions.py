"""Exceptions raised by algkit"""


class AlgkitError(Exception):
    """Base class for every error algkit raises on purpose"""

    exit_code = 3

    def __init__(self, message: str, path: str | None = None):
        self.message = message
        self.path = path
        super().__init__(f'{path}: {message}' if path else message)

    def at(self, path: str) -> 'AlgkitError':
        """Copy of this error located at a definition-file field"""
        return type(self)(self.message, path=path)


class ParseError(AlgkitError):
    """Input that cannot be read at all (bad JSON, bad expression syntax)"""

    exit_code = 2


class UsageError(AlgkitError):
    """A command or option the CLI does not know"""

    exit_code = 2


class ExpressionSyntaxError(ParseError):
    def __init__(self, reason: str, position: int, path: str | None = None):
        self.reason = reason
        self.position = position
        super().__init__(f'{reason} (at position {position})', path=path)

    def at(self, path: str) -> 'ExpressionSyntaxError':
        return ExpressionSyntaxError(self.reason, self.position, path=path)


class SemanticError(AlgkitError):
    """Well-formed input describing an impossible or inconsistent structure"""

    exit_code = 3


class UnknownIdentifierError(SemanticError):
    pass


class IndexRangeError(SemanticError):
    pass


class SkewViolationError(SemanticError):
    pass


class UnknownTensorError(SemanticError):
    pass


class TensorKindError(SemanticError):
    pass


class NonlinearTensorError(SemanticError):
    """A tensor on a total space is not linear in the fiber coordinates"""


class SpaceMismatchError(AlgkitError):
    """Operands live in different variable spaces or on different bundles"""


class DegreeError(AlgkitError):
    """Degree or shape preconditions of an operation do not hold"""


class PreconditionError(AlgkitError):
    """The algebroid lacks a property the operation requires"""
