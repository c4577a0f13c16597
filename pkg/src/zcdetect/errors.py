"""Exception types raised across the package."""


class ZCError(Exception):
    """Base class for all zcdetect errors."""


class NonHermitian(ZCError, ValueError):
    pass


class NotPSD(ZCError, ValueError):
    pass


class NoConvergence(ZCError, ArithmeticError):
    pass


class DimensionMismatch(ZCError, ValueError):
    pass


class IndexOutOfRange(ZCError, IndexError):
    pass


class NotSpecialUnitary(ZCError, ValueError):
    pass


class OutOfRange(ZCError, ValueError):
    pass


class InvalidInput(ZCError, ValueError):
    pass


class WeightError(ZCError, ValueError):
    pass


class DecompositionMismatch(ZCError, ValueError):
    pass


class RankDeficient(ZCError, ValueError):
    pass


class NotCanonical(ZCError, ValueError):
    pass


class UnsupportedShape(ZCError, ValueError):
    pass
