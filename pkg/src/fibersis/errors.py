"""Exception types shared across the package."""


class FiberError(ValueError):
    """Invalid table, matrix, margin, or partial assignment."""


class EmptyFiberError(FiberError):
    """Raised when an operation needs a nonempty fiber and gets an empty one."""


class ResourceBudgetExceeded(RuntimeError):
    """A search or box enumeration exceeded its configured budget.

    ``progress`` carries whatever partial information the caller can use
    (node counts, the cell being explored, ...).
    """

    def __init__(self, message, progress=None):
        super().__init__(message)
        self.progress = dict(progress or {})
