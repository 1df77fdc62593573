"""Exception types shared across the package.

Every error carries an ``exit_code`` used by the CLI:
2 parse/validation, 3 precondition, 4 cap exceeded, 5 internal check.
"""

from __future__ import annotations


class GroupEqError(Exception):
    exit_code = 1


class NotAGroup(GroupEqError):
    """A multiplication table violates a group axiom.

    ``reason`` is one of ``no-identity``, ``missing-inverse``,
    ``non-associative``, ``not-closed``; it names the first violated axiom.
    """

    exit_code = 2

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        self.detail = detail
        msg = f"not a group ({reason})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class UnknownFamily(GroupEqError):
    exit_code = 2


class ParameterOutOfRange(GroupEqError):
    exit_code = 2


class ParseError(GroupEqError):
    """Malformed textual input (terms, group files, equation files, DIMACS)."""

    exit_code = 2

    def __init__(self, message: str, position: int | None = None,
                 expected: tuple[str, ...] = ()):
        self.position = position
        self.expected = expected
        if position is not None:
            message = f"{message} (at position {position})"
        if expected:
            message = f"{message}; expected one of: {', '.join(expected)}"
        super().__init__(message)


class UnboundVariable(GroupEqError):
    exit_code = 2


class NotNormal(GroupEqError):
    exit_code = 3


class IsNilpotent(GroupEqError):
    exit_code = 3


class NotSolvable(GroupEqError):
    exit_code = 3


class PreconditionFailed(GroupEqError):
    exit_code = 3


class IndexTooSmall(GroupEqError):
    """Centralizer index is <= 2 where the coloring gadget needs > 2 colors."""

    exit_code = 3


class IndexNotTwo(GroupEqError):
    """Centralizer index is != 2 where the SAT gadget needs exactly 2 cosets."""

    exit_code = 3


class NotApplicable(GroupEqError):
    exit_code = 3


class CapExceeded(GroupEqError):
    exit_code = 4


class SearchSpaceTooLarge(GroupEqError):
    exit_code = 4

    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(f"search space has {size} assignments, cap is {cap}")


class InternalCheckFailed(GroupEqError):
    """A machine-checked postcondition failed; signals a bug, not bad input."""

    exit_code = 5


class WitnessInvalid(GroupEqError):
    exit_code = 5
