"""Exception hierarchy shared by every module of the package."""


class MordellError(Exception):
    """Base class for all errors raised by this package."""


class SingularCurve(MordellError):
    pass


class PointNotOnCurve(MordellError):
    pass


class BadReductionPrime(MordellError):
    pass


class GuardExceeded(MordellError):
    """A size guard (scalar multiple, coordinate size, prime count) was hit."""


class ConstantPolynomial(MordellError):
    pass


class NonpositiveGeneratorHeight(MordellError):
    pass


class InvalidDimension(MordellError):
    pass


class DegenerateFamily(MordellError):
    pass


class ZeroVector(MordellError):
    pass


class PreconditionViolated(MordellError):
    pass


class DegreeOrderViolation(MordellError):
    pass


class HypothesisFailed(MordellError):
    pass


class StabilityNotReached(MordellError):
    """The sieve stopped with survivors that could not be settled exactly."""

    def __init__(self, message, survivors=()):
        super().__init__(message)
        self.survivors = list(survivors)


class ParseError(MordellError):
    pass


class ValidationError(MordellError):
    pass
