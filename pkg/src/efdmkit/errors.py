"""Exception types raised across the package."""


class MatchError(ValueError):
    """Base class for invalid inputs to a matching or statistics routine."""


class EmptySampleError(MatchError):
    def __init__(self, what: str = "sample"):
        super().__init__(f"empty {what}")


class LengthMismatchError(MatchError):
    pass


class ShapeMismatchError(MatchError):
    """Raised when two tensors disagree along an axis that must match."""

    def __init__(self, axis: str, left: int, right: int):
        self.axis = axis
        super().__init__(f"shape mismatch along axis {axis}: {left} != {right}")


class NpyFormatError(ValueError):
    """Base class for malformed or unsupported tensor files."""


class BadMagicError(NpyFormatError):
    pass


class UnsupportedVersionError(NpyFormatError):
    pass


class BadHeaderError(NpyFormatError):
    pass


class UnsupportedDtypeError(NpyFormatError):
    pass


class FortranOrderError(NpyFormatError):
    pass


class RankError(NpyFormatError):
    pass


class PayloadSizeError(NpyFormatError):
    pass


class NonFiniteError(NpyFormatError):
    pass
