class PlanningError(Exception):
    """Base class for every error raised by resplan."""


class EmptyMap(PlanningError):
    pass


class NoVoronoiEdge(PlanningError):
    pass


class OutOfBounds(PlanningError):
    pass


class DimensionMismatch(PlanningError):
    pass


class NoFreeSpace(PlanningError):
    pass


class InsufficientObstacles(PlanningError):
    pass


class GridFormatError(PlanningError, ValueError):
    pass


class DegenerateSegment(PlanningError):
    pass


class SearchFailure(PlanningError):
    """Hybrid A* gave up; carries the number of expansions spent."""

    def __init__(self, message, expansions=0):
        super().__init__(message)
        self.expansions = expansions


class NoPath(SearchFailure):
    pass


class ExpansionLimit(SearchFailure):
    pass


class PlanFailure(PlanningError):
    def __init__(self, message, cause=None, report=None):
        super().__init__(message)
        self.cause = cause
        self.report = report


class DensityUnreachable(PlanningError):
    pass


class NoReferencePath(PlanningError):
    pass


class ConfigError(PlanningError, ValueError):
    pass


class IoFailure(PlanningError, OSError):
    pass
