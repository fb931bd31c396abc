class CechError(Exception):
    pass


class StructureError(CechError, ValueError):
    """Malformed input: unknown identifiers, partial maps, duplicates."""


class DomainError(CechError, ValueError):
    pass


class InvalidError(CechError, ValueError):
    """An object failed validation where a valid one was required."""

    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = list(report or [])


class BudgetExceeded(CechError):
    pass
