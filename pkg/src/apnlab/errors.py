"""Exception types shared across the package."""

from __future__ import annotations


class PreconditionError(ValueError):
    """A documented precondition of an operation does not hold.

    The message names the violated condition (e.g. ``"gcd(i,n)=1"``) so that
    callers and the CLI can surface it verbatim.
    """


class MemoryBudgetError(RuntimeError):
    """An operation would exceed the configured memory budget."""
