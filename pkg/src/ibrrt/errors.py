"""Exception hierarchy shared by every module."""


class PlanningError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(PlanningError, ValueError):
    """An operation was called with arguments outside its contract."""


class EnvironmentParseError(PlanningError, ValueError):
    """An environment document could not be parsed."""


class EnvironmentValidationError(PlanningError, ValueError):
    """An environment document parsed but violates an invariant.

    ``field`` names the offending document field (``"start"``, ``"goal"``...).
    """

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class DegenerateEnvironmentError(PlanningError, RuntimeError):
    """Free space could not be sampled within the rejection budget."""
