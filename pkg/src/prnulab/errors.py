"""Exception hierarchy shared by all modules."""


class PrnuLabError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatch(PrnuLabError):
    """Two images (or an image and a pattern) differ in shape."""


class ImageTooSmall(PrnuLabError):
    """Raw image is smaller than the requested crop; camera is ineligible."""


class TooManyLevels(PrnuLabError):
    """Image dimensions cannot support the requested decomposition depth."""


class MalformedPyramid(PrnuLabError):
    """Wavelet pyramid structure is inconsistent."""


class NotTileable(PrnuLabError):
    """Image dimensions are not divisible by the 8x8 block grid."""


class EmptyTrainingSet(PrnuLabError):
    """Fingerprint estimation called with no images."""


class NoPatterns(PrnuLabError):
    """Identification called with an empty pattern list."""


class InvalidSpec(PrnuLabError):
    """Attack description failed validation."""


class DatasetError(PrnuLabError):
    """Problem with an on-disk camera dataset."""


class TooFewImages(DatasetError):
    """A camera has fewer than the minimum number of images for a split."""


class ReportInvariantBroken(PrnuLabError):
    """A benchmark report failed its internal consistency checks."""
