"""Exception types shared across the package."""


class GcaError(Exception):
    """Base class; every error carries a JSON-friendly ``witness``."""

    def __init__(self, message: str = "", witness=None):
        super().__init__(message)
        self.witness = witness


class InvalidInput(GcaError, ValueError):
    pass


class RankDropAtPoint(GcaError, ArithmeticError):
    def __init__(self, message: str, point):
        super().__init__(message, witness={"point": [str(c) for c in point]})
        self.point = tuple(point)


class UnsupportedCartan(GcaError):
    pass


class NotSemisimpleCartan(GcaError):
    pass


class NotClosed(GcaError):
    pass


class UnsupportedAlgebra(GcaError):
    pass


class InconsistentData(GcaError):
    pass


class NoAdaptedSplit(GcaError):
    pass
