"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside an operation's domain."""


class PlanError(ValueError):
    """A sweep plan is structurally invalid (schedule, node budget)."""


class NumericalError(ArithmeticError):
    """A computation produced or received non-finite values."""


class DivergenceError(NumericalError):
    """A requested closed-form integral does not converge."""


class ConvergenceError(NumericalError):
    """An iteration failed to converge within its iteration budget."""

    def __init__(self, message: str, iterations: int, last_value: float, last_delta: float):
        super().__init__(message)
        self.iterations = iterations
        self.last_value = last_value
        self.last_delta = last_delta


class IllConditionedError(NumericalError):
    """A linear system is too ill-conditioned to solve reliably."""

    def __init__(self, message: str, estimate: float):
        super().__init__(message)
        self.estimate = estimate
