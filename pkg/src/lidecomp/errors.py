"""Shared exception types.

Two families cover every failure mode in the toolkit: bad input versus
exhausted search/budget. The CLI maps them to exit codes 2 and 3.
"""


class InputError(ValueError):
    """Rejected input: malformed file, violated precondition, invalid profile."""


class BudgetError(RuntimeError):
    """A bounded search ran out of budget (generation, solving, rounding, exact search)."""
