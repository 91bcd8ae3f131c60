"""Exception and warning types raised by nanoraman."""


class RamanError(Exception):
    """Base class for all nanoraman errors."""


class ValidationError(RamanError, ValueError):
    """Input violates a documented precondition."""


class InsufficientDataError(ValidationError):
    """Fewer samples than the minimum required (8)."""


class ParseError(ValidationError):
    """A spectrum file row could not be parsed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DomainError(ValidationError):
    """Argument outside the mathematical domain of an operation."""


class NonPhysicalRatioError(DomainError):
    """Anti-Stokes/Stokes ratio incompatible with a positive temperature."""


class NoPeakError(RamanError):
    """Spectrum maximum sits on the first or last sample."""


class IncompletePeakError(NoPeakError):
    """A half-maximum crossing is missing on one side of the peak."""


class RankDeficiencyError(RamanError):
    """Straight-line fit requested on data with a single distinct abscissa."""


class NoFitError(RamanError):
    """Least-squares inversion produced no usable solution."""


class TableLookupError(RamanError, KeyError):
    """Wavelength missing from an absorption table."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class FitQualityWarning(UserWarning):
    """Optimum pinned to a search boundary or otherwise suspect."""


class GridRangeWarning(UserWarning):
    """Model grid extends beyond the recommended dispersion window."""
