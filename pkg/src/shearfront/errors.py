"""Exception types shared across the package."""


class ShearfrontError(Exception):
    """Base class for all package-specific errors."""


class InvalidElementError(ShearfrontError):
    """Raised for coordinates that do not describe a group element (e.g. a = 0)."""


class SpecMismatchError(ShearfrontError):
    """Raised when elements of different group specs are combined."""


class NotInGroupError(ShearfrontError):
    """Raised when a matrix is not (numerically) a member of the group."""


class OutsideOrbitError(ShearfrontError):
    """Raised for frequency points on the orbit complement (xi_1 = 0)."""


class ConstraintViolation(ShearfrontError):
    """A numeric constraint required by the requested operation fails.

    The message names the violated inequality.
    """


class UnsupportedCombinationError(ShearfrontError):
    """Raised for (distribution, wavelet) pairs with no evaluation route."""


class QuadratureError(ShearfrontError):
    """Raised when a quadrature refuses to run (e.g. divergent integrand)."""
