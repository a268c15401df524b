"""Exception types shared across the package."""


class CapacityError(RuntimeError):
    """A requested problem size exceeds a configured or structural limit."""


class NumericalBreakdownError(RuntimeError):
    """A linear solve or eigensolve failed to produce usable numbers.

    Carries the time-step index when the failure happened inside a stepping
    loop (``step_index`` is None otherwise).
    """

    def __init__(self, message: str, step_index: int | None = None):
        if step_index is not None:
            message = f"{message} (at step {step_index})"
        super().__init__(message)
        self.step_index = step_index
