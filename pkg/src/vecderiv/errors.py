"""Exception types shared across the package."""


class VecderivError(Exception):
    """Base class for all vecderiv errors."""


class SizeOverflow(VecderivError):
    """A requested object would exceed the entry-count guard."""


class ShapeError(VecderivError, ValueError):
    """Input dimensions do not conform."""


class RangeError(VecderivError, ValueError):
    """An index or position argument is out of range."""


class NonSymmetricInput(VecderivError, ValueError):
    """A vector expected to be permutation-symmetric is not."""


class UnknownKind(VecderivError, ValueError):
    """An unrecognized shape/kind descriptor was supplied."""


class MissingOrder(VecderivError, LookupError):
    """A jet or moment/cumulant set does not supply a required order."""


class UnsupportedOrder(VecderivError, ValueError):
    """The requested derivative order is outside what the routine supports."""


class StepTooSmall(VecderivError, ArithmeticError):
    """Finite-difference estimates are dominated by cancellation noise."""


class NotSpd(VecderivError, ValueError):
    """A matrix required to be symmetric positive definite is not."""
