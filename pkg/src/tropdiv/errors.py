"""Exception hierarchy. The CLI maps each family to an exit code."""


class TropdivError(Exception):
    exit_code = 1


class ValidationError(TropdivError, ValueError):
    """Malformed input: bad JSON shape, unknown ids, disconnected graph."""

    exit_code = 2


class PreconditionError(TropdivError, ValueError):
    exit_code = 3


class BindingError(PreconditionError):
    """Divisors bound to different graphs were combined."""


class RefinementError(PreconditionError):
    """A point is not on the working grid it was asked to live on."""


class UnsupportedShapeError(PreconditionError):
    pass


class ResourceError(TropdivError, RuntimeError):
    exit_code = 4


class ConsistencyError(TropdivError, AssertionError):
    """An internal cross-check between two independent routes disagreed."""

    exit_code = 1
