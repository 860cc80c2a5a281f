"""Shared exception types."""


class BudgetExceeded(RuntimeError):
    """A computation was refused because it would exceed its work budget."""

    def __init__(self, message: str, required: int, budget: int):
        super().__init__(message)
        self.required = required
        self.budget = budget
