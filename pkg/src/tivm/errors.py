"""Exception hierarchy shared across the toolkit."""


class TivmError(Exception):
    """Base class for all toolkit errors."""


class ShapeMismatchError(TivmError):
    """Operands do not share the required (c, h, w) shape."""


class DegenerateNormError(TivmError):
    """A tensor (or bank cube) has Frobenius norm below the usable floor."""


class InvalidCapacityError(TivmError):
    """Bank capacity or cube dimensions are not positive integers."""


class InvalidRateError(TivmError):
    """A read/write rate is not strictly positive."""


class EmptySequenceError(TivmError):
    """A frame sequence that must be non-empty is empty."""


class FormatError(TivmError):
    """A file does not conform to its declared binary/CSV layout."""


class NonFiniteDataError(TivmError):
    """Loaded payload contains NaN or infinite values."""


class ImageTooSmallError(TivmError):
    """Raster smaller than the requested pooling grid."""


class LabelMismatchError(TivmError):
    """Frame files and label rows do not align one-to-one."""


class ShapeInconsistentError(TivmError):
    """Frames in one sequence do not share a single shape."""


class IndexOutOfRangeError(TivmError):
    """Frame index or window length outside the valid range."""


class LengthMismatchError(TivmError):
    """Prediction and label sequences have different lengths."""
