"""Exception hierarchy.

All package errors derive from :class:`OrliczRadiusError` so callers can
distinguish library failures from built-in exceptions.
"""


class OrliczRadiusError(Exception):
    """Base class for all errors raised by this package."""


class NonFiniteError(OrliczRadiusError):
    """Input contains NaN or Inf entries."""


class NotHermitianError(OrliczRadiusError):
    """Matrix expected to be Hermitian is not, beyond tolerance."""


class NotPSDError(OrliczRadiusError):
    """Matrix expected to be positive semidefinite has a significantly
    negative eigenvalue."""


class SingularMatrixError(OrliczRadiusError):
    """Matrix expected to be invertible is numerically singular."""


class SingularWeightError(OrliczRadiusError):
    """Weight matrix is not positive definite (singular or indefinite).

    Distinct from :class:`SingularMatrixError` so weight validation failures
    are identifiable: semi-definite weights are rejected by design.
    """


class DimensionMismatchError(OrliczRadiusError):
    """Operands have incompatible shapes."""


class NoDensityError(OrliczRadiusError):
    """Orlicz function has no usable density, so the complementary
    function cannot be constructed."""


class NegativeInputError(OrliczRadiusError):
    """Argument required to be nonnegative is negative."""


class MissingRoleError(OrliczRadiusError):
    """Bound instance is missing a matrix role required by the bound."""


class FixtureMismatchError(OrliczRadiusError):
    """A regression fixture quantity deviates from its frozen value.

    Carries the name of the deviating quantity plus got/expected values.
    """

    def __init__(self, quantity: str, got: float, expected: float):
        self.quantity = quantity
        self.got = got
        self.expected = expected
        super().__init__(
            f"fixture quantity {quantity!r}: got {got!r}, expected {expected!r}"
        )


class MatrixFileError(OrliczRadiusError):
    """Matrix JSON file is malformed or inconsistent."""
