"""Exception hierarchy shared by services and the command front end.

Every error carries the process exit code the dispatcher should return for it.
"""


class WorkbenchError(Exception):
    """Base class for all workbench failures."""

    exit_code = 3


class InputValidationError(WorkbenchError, ValueError):
    """Arguments outside an operation's domain."""

    exit_code = 2


class PoleError(InputValidationError):
    """Evaluation requested at a pole."""


class RegimeMismatchError(InputValidationError):
    """Parameters fit none of the regimes an experiment knows about."""


class BudgetError(WorkbenchError):
    """A coefficient or term budget is too small for the requested accuracy."""


class TruncationError(BudgetError):
    """A q-series is truncated below the order an operation needs."""


class ConvergenceError(WorkbenchError):
    """An iterative or refined computation failed to settle."""


class InvariantViolationError(ConvergenceError):
    """A certified bound or internal consistency check failed."""


class CorruptCacheError(WorkbenchError):
    """A cache file could not be parsed."""

    def __init__(self, path, line: int, message: str):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}")
