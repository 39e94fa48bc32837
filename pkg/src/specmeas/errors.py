"""Exception hierarchy shared by all modules."""


class SpecMeasError(Exception):
    """Base class for every error raised by specmeas."""


class InvalidMeasure(SpecMeasError, ValueError):
    pass


class NotSymmetric(SpecMeasError, ValueError):
    pass


class CoefficientOutOfDisk(SpecMeasError, ValueError):
    pass


class MomentSpaceViolation(SpecMeasError, ValueError):
    """The moment vector does not belong to the (closed) moment space."""


class Degenerate(SpecMeasError, ValueError):
    """The measure is supported on fewer points than the request needs."""


class RootFindingFailure(SpecMeasError, ArithmeticError):
    pass


class EigensolverFailure(SpecMeasError, ArithmeticError):
    pass


class OutOfRange(SpecMeasError, ValueError):
    pass


class NewtonDivergence(SpecMeasError, ArithmeticError):
    pass


class InsideSpectrum(SpecMeasError, ValueError):
    pass


class GridMismatch(SpecMeasError, ValueError):
    pass


class BinUnderflow(SpecMeasError, ValueError):
    pass


class ZeroHits(SpecMeasError, RuntimeError):
    pass


class CyclicityWarning(UserWarning):
    """e_1 is (numerically) not cyclic: some spectral weight vanishes."""
