"""Exception hierarchy shared by all modules."""


class StructreeError(Exception):
    """Base class for errors raised by this package."""


class InputError(StructreeError):
    """Invalid input: bad label, malformed file, violated precondition."""


class PreconditionError(InputError):
    """An operation's stated precondition does not hold for the given data."""


class BudgetError(StructreeError):
    """A lazy expansion exceeded the configured resource budget."""


class CheckFailure(StructreeError):
    """A structural assertion failed with a witness (e.g. a cycle in a tree)."""
