"""Exception types shared across the package."""

from __future__ import annotations


class SumstarError(Exception):
    """Base class for every error raised by this package."""


class MissingBinding(SumstarError):
    """A formula was evaluated under an environment lacking a variable."""

    def __init__(self, name: str):
        super().__init__(f"no binding for variable '{name}'")
        self.name = name


class SizeLimitExceeded(SumstarError):
    """A normal-form conversion grew past its configured cap."""


class ResourceLimit(SumstarError):
    """A search exceeded its configured node or candidate budget.

    This is a first-class outcome, distinct from an unsatisfiable verdict:
    callers that catch it must not report UNSAT.
    """


class ValidationError(SumstarError):
    """A problem failed the fragment well-formedness rules.

    Carries the complete list of violations, each a (code, message) pair.
    """

    def __init__(self, violations):
        lines = "; ".join(f"{code}: {msg}" for code, msg in violations)
        super().__init__(lines or "invalid problem")
        self.violations = list(violations)


class ParseError(SumstarError):
    """Malformed input text; reports a 1-based line and column."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class DuplicateDeclaration(ParseError):
    """The same identifier was declared (or bound) twice."""


class DimensionMismatch(ParseError):
    """A certificate vector has the wrong arity for its star atom."""


class CertificateError(SumstarError):
    """A certificate failed verification; names the first failing check."""

    def __init__(self, check: str, message: str):
        super().__init__(f"{check}: {message}")
        self.check = check
