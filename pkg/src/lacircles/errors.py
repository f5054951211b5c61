"""Exception types raised across the package."""


class CircleDetectionError(Exception):
    """Base class for all errors raised by lacircles."""


class ImageFormatError(CircleDetectionError, ValueError):
    """The file is not a supported raster format."""


class DimensionError(CircleDetectionError, ValueError):
    pass


class InsufficientDataError(CircleDetectionError, ValueError):
    """Fewer edge pixels than a circle needs (three)."""


class CollinearPointsError(CircleDetectionError, ValueError):
    pass


class DegenerateRadiusError(CircleDetectionError, ValueError):
    pass


class ZeroSupportError(CircleDetectionError, ValueError):
    """A circle has no rasterized point inside the image."""


class EmptyActionSetError(CircleDetectionError, ValueError):
    pass


class NoCandidatesError(CircleDetectionError):
    """No candidate circle survived filtering ("no circle detected")."""


class SpecError(CircleDetectionError, ValueError):
    """Invalid scene specification."""
