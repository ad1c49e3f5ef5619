"""Exception types raised across the package."""


class DDRError(Exception):
    """Base class for all errors raised by :mod:`ddr`."""


class DomainError(DDRError, ValueError):
    pass


class LambdaOutOfRange(DomainError):
    """Exponent lambda >= 1: the dispersion integral diverges."""


class InvalidLogPower(DomainError):
    pass


class OrderTooLarge(DomainError):
    pass


class PoleError(DomainError):
    """Evaluation at a pole of tan (cos alpha == 0)."""


TanPoleError = PoleError


class PoleTermError(DomainError):
    """A denominator 2p+1+lambda of a tail sum vanishes."""


class MaxTermsExceeded(DDRError, ArithmeticError):
    pass


class EnergyTooClose(DomainError):
    """E/m too close to the threshold E = m."""


class AccuracyNotReached(DDRError, ArithmeticError):
    pass


class ParityMismatch(DDRError, ValueError):
    pass


class NotConverged(DDRError, ArithmeticError):
    def __init__(self, msg, trace=None):
        super().__init__(msg)
        self.trace = trace


class UnsupportedLogPower(DDRError, NotImplementedError):
    pass


class SchemaError(DDRError, ValueError):
    def __init__(self, path, msg):
        super().__init__(f"{path}: {msg}" if path else msg)
        self.path = path


class TermError(DDRError):
    """Wraps an error raised while evaluating one term of a sum."""

    def __init__(self, index, error):
        super().__init__(f"term {index}: {error}")
        self.index = index
        self.error = error
