"""Failure modes callers are expected to handle.

The CLI maps these onto documented exit codes; library code never swallows
them.
"""


class PreconditionError(ValueError):
    """A mathematical precondition is violated (split prime, bad conductor, ...)."""


class SearchBoundExceeded(RuntimeError):
    """An exhaustive search hit its configured bound without an answer."""


class PrecisionError(ArithmeticError):
    """A p-adic computation no longer carries enough digits to be trusted."""
