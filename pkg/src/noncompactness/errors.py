"""Exception hierarchy shared by all modules.

CLI exit-code mapping: InputError -> 2, CapacityError -> 3, any failed
invariant or rejected witness surfaced by ``verify`` -> 1.
"""

from __future__ import annotations


class InputError(ValueError):
    """Malformed or inconsistent input (dimension mismatch, bad schema, ...)."""


class UnsupportedSpaceError(InputError):
    """Operation not defined for the given norm tag or dimension."""


class UndefinedBudgetError(InputError):
    """Budget outside the range where the quantity is defined."""


class CapacityError(RuntimeError):
    """Exact mode would exceed a configured enumeration cap."""

    def __init__(self, message: str):
        super().__init__(message + " (consider heuristic mode or a larger cap)")


class WitnessRejected(ValueError):
    """A certificate transform received an infeasible witness.

    ``constraint`` pinpoints the violated condition.
    """

    def __init__(self, constraint: str):
        super().__init__(f"infeasible witness: {constraint}")
        self.constraint = constraint
