"""Exception types raised by the AdaWave pipeline."""


class AdaWaveError(Exception):
    """Base class for all errors raised by this package."""


class InvalidDatasetError(AdaWaveError, ValueError):
    pass


class RaggedRows(InvalidDatasetError):
    """Rows of the input do not share one dimensionality."""


class NonFiniteCoordinate(InvalidDatasetError):
    pass


class LabelLengthMismatch(InvalidDatasetError):
    pass


class EmptyDataset(InvalidDatasetError):
    pass


class PointOutOfBounds(AdaWaveError, ValueError):
    pass


class IdOutOfRange(AdaWaveError, ValueError):
    pass


class CapacityError(AdaWaveError, OverflowError):
    """The grid has more cells than a 64-bit packed id can address."""


class UnknownBasis(AdaWaveError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown wavelet basis"


class TooManyLevels(AdaWaveError, ValueError):
    pass


class EmptyMap(AdaWaveError, ValueError):
    pass


class DegenerateCurveWarning(UserWarning):
    """Sorted densities are constant (or too short), so no elbow exists."""


class LengthMismatch(AdaWaveError, ValueError):
    pass


class EmptyScope(AdaWaveError, ValueError):
    pass


class NoClusters(AdaWaveError, ValueError):
    pass


class InvalidConfig(AdaWaveError, ValueError):
    pass
