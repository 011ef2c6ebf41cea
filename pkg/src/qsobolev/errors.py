"""Exception hierarchy shared by all modules."""


class QSobolevError(Exception):
    """Base class for every error raised by this package."""


class MaxTermsExceeded(QSobolevError):
    pass


class DivergentSeries(QSobolevError):
    pass


class PoleInLowerParameter(QSobolevError):
    pass


class NonconvergentTail(QSobolevError):
    pass


class DegenerateArguments(QSobolevError):
    pass


class DegreeTooHigh(QSobolevError):
    pass


class BracketFailure(QSobolevError):
    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class PartialZeroSet(QSobolevError):
    pass


class InterlacingViolation(QSobolevError):
    pass


class MonotonicityViolation(QSobolevError):
    pass


class NegativeN0(QSobolevError):
    pass


class NoSolutionWithinCap(QSobolevError):
    pass


class PrecisionError(QSobolevError):
    """Raised when a result is not stable under a precision increase."""


class DegenerateKernel(UserWarning):
    """Warning: the (1,1) derivative kernel vanishes, so r_n falls back to p_n."""
