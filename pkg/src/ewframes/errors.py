"""Exception hierarchy.

Every error belongs to one of three classes that the command line maps to
stable exit codes: validation (2), numerical (3) and I/O (4).
"""

from __future__ import annotations


class EWFError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ValidationError(EWFError, ValueError):
    exit_code = 2


class NumericalError(EWFError, ArithmeticError):
    exit_code = 3


class FormatError(EWFError, OSError):
    exit_code = 4


# partitions
class NonMonotoneBoundaries(ValidationError):
    pass


class MissingZero(ValidationError):
    pass


class TooFewBoundaries(ValidationError):
    pass


class RayWithoutNeighbor(ValidationError):
    pass


class NotEnoughExtrema(ValidationError):
    pass


# mother wavelets / scale factors
class InvalidProfile(ValidationError):
    pass


class ZeroLengthSupport(ValidationError):
    pass


class EmptyEssentialSupport(ValidationError):
    pass


class CompactSupportRayUnsupported(ValidationError):
    pass


class NonIntegrableProfile(NumericalError):
    pass


# systems and transforms
class EmptySystem(ValidationError):
    pass


class ExcludedBand(ValidationError):
    pass


class IncommensurateShiftStep(ValidationError):
    pass


class SystemMismatch(ValidationError):
    pass


class NotConverged(NumericalError):
    """Iterative inversion stopped before reaching the tolerance.

    The best iterate is kept on ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


# frame analysis
class NegativeScaleOnCompact(ValidationError):
    pass


class AlphaNotInLattice(ValidationError):
    pass


class TruncationInsufficient(NumericalError):
    pass


class InconsistentCertificate(NumericalError):
    pass
