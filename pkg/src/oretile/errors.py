"""Exception types shared across the package.

Each class maps to one CLI exit code, so callers can tell a bad input apart
from an exhausted search budget or a broken structural claim.
"""


class PreconditionError(ValueError):
    """An operation was called on input outside its stated domain."""

    exit_code = 2


class BudgetExhausted(RuntimeError):
    """A bounded search ran out of nodes before reaching a verdict."""

    exit_code = 3

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class LemmaViolation(RuntimeError):
    """A checked structural statement failed on a concrete instance.

    ``witness`` carries whatever data is needed to reproduce the failure.
    """

    exit_code = 4

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
