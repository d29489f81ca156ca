"""Exception hierarchy shared by every module."""


class OpMeasureError(Exception):
    """Base class for all package errors."""


class NotSquare(OpMeasureError):
    pass


class NotHermitian(OpMeasureError):
    pass


class NumericalFailure(OpMeasureError):
    pass


class DomainMismatch(OpMeasureError):
    pass


class IntractablePartitionCount(OpMeasureError):
    pass


class NotCauchy(OpMeasureError):
    pass


class NotMonotone(OpMeasureError):
    pass


class BoundViolated(OpMeasureError):
    pass


class IncompatibleFamily(OpMeasureError):
    """Raised when a family fails its compatibility check; carries the report."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotARepresentation(OpMeasureError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class InvalidMeasure(OpMeasureError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class EmptyBlueprint(OpMeasureError):
    pass


class BadConfig(OpMeasureError):
    pass


class BadInstanceFile(OpMeasureError):
    """Schema violation in an instance file; ``path`` names the offending field."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
