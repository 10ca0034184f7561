class UrykitError(Exception):
    pass


class InputError(UrykitError, ValueError):
    """Malformed or invariant-violating input (CLI exit code 2)."""


class PreconditionError(UrykitError, ValueError):
    """A well-formed input that fails an operation's precondition."""


class BudgetError(UrykitError, RuntimeError):
    """An exponential construction would exceed its size budget."""
