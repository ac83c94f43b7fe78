"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument violates a documented precondition or invariant."""


class InstanceFormatError(ValueError):
    """An instance file is malformed or violates instance invariants."""


class InfeasibleInstanceError(RuntimeError):
    """No facility subset satisfies the capacity constraint."""


class BudgetExceededError(RuntimeError):
    """Exhaustive enumeration would exceed the configured subset budget."""
