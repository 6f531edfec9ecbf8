"""Exception types raised across the package."""


class SectorBoundsError(Exception):
    """Base class for every error raised by sectorbounds."""


class InvalidInput(SectorBoundsError, ValueError):
    pass


class NonSquare(InvalidInput):
    pass


class SchemaError(InvalidInput):
    pass


class NumericalFailure(SectorBoundsError, ArithmeticError):
    pass


class NotPsd(SectorBoundsError, ValueError):
    pass


class BlockNotPsd(NotPsd):
    pass


class InvalidAngle(SectorBoundsError, ValueError):
    pass


class MethodInapplicable(SectorBoundsError):
    pass


class BoundaryAmbiguous(SectorBoundsError):
    """The requested angle sits too close to the exact sector angle to decide."""


class InvalidSelector(SectorBoundsError, ValueError):
    pass


class NotConcave(SectorBoundsError, ValueError):
    pass


class InvalidScale(SectorBoundsError, ValueError):
    pass


class InvalidRange(SectorBoundsError, ValueError):
    pass


class InvalidExponent(SectorBoundsError, ValueError):
    pass


class NotInSector(SectorBoundsError):
    pass


class PreconditionFailed(SectorBoundsError):
    pass


class NotApplicable(SectorBoundsError):
    pass


class AngleTooSmall(SectorBoundsError):
    pass


class CounterexampleAlarm(SectorBoundsError):
    """A check of a proven inequality failed. Points at a harness bug or a tolerance problem."""
