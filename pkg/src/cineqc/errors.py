"""Exception hierarchy shared across the package."""


class CineQcError(Exception):
    """Base class for all package errors."""


class SpecError(CineQcError):
    """A parameter object violates its own invariants."""


class DimensionError(CineQcError):
    """Array has an unsupported number of dimensions."""


class ShapeError(CineQcError):
    """Array shapes are inconsistent with each other or with a plan."""


class CorruptHeader(CineQcError):
    """File header failed magic/consistency checks."""


class UnsupportedDatatype(CineQcError):
    """File declares a datatype outside the supported set."""


class IoError(CineQcError):
    """Read or write failed at the filesystem level."""


class RangeError(CineQcError):
    """Scalar argument outside its documented range."""


class ParameterError(CineQcError):
    """Invalid plan or solver parameter."""


class EmptyFrame(CineQcError):
    """Operation requires at least one spoke in the frame."""


class NegativeMagnitude(CineQcError):
    """Magnitude input contains negative values."""


class DivergenceError(CineQcError):
    """Iterative solve diverged (residual grew by more than 10x)."""


class TooSmall(CineQcError):
    """Image smaller than the metric window."""


class DegenerateLabels(CineQcError):
    """Classifier training requires both classes to be present."""


class EmptyMask(CineQcError):
    """Surface distances are undefined for an empty mask."""


class NonFiniteImage(CineQcError):
    """Registration input contains NaN or infinity."""


class SingularTransform(CineQcError):
    """Affine transform is not invertible."""


class EmptyAtlas(CineQcError):
    """RCA needs at least one template."""


class MissingModel(CineQcError):
    """No trained model for a required (structure, phase) pair."""


class ZeroVariance(CineQcError):
    """Correlation undefined for a constant sequence."""


class LengthMismatch(CineQcError):
    """Paired sequences must have equal length."""


class ConfigError(CineQcError):
    """Pipeline configuration invalid or inconsistent."""


class MissingMask(CineQcError):
    """External segmentation file not found."""


class IntensityModelMismatch(CineQcError):
    """Phantom threshold segmenter applied to data far from its palette."""
