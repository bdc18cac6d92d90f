class CommexpError(Exception):
    """Base class of every error raised by commexp."""


class DimensionError(CommexpError, ValueError):
    pass


class NonFiniteError(CommexpError, ValueError):
    pass


class SingularMatrixError(CommexpError, ValueError):
    pass


class PreconditionError(CommexpError, ValueError):
    pass


class ToleranceError(CommexpError, ValueError):
    pass


class GenerationError(CommexpError, RuntimeError):
    pass


class InvariantViolation(CommexpError, RuntimeError):
    """An internal contradiction between two results that theory says must agree."""


class InputError(CommexpError, ValueError):
    """Malformed JSON input or a document missing required fields."""


class OutOfRangeError(CommexpError, ArithmeticError):
    """An exponential whose entries do not fit in double precision."""
