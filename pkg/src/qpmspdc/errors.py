"""Exception hierarchy shared by all modules."""


class QPMError(Exception):
    """Base class for every error raised by this package."""


class InputError(QPMError, ValueError):
    """Malformed or non-finite input."""


class WavelengthRangeError(QPMError, ValueError):
    """Wavelength outside the validity window of a dispersion model."""


class SellmeierParseError(QPMError, ValueError):
    """A Sellmeier data file could not be parsed."""


class ArityError(SellmeierParseError):
    """Coefficient count does not match the declared functional form."""


class GuidanceError(QPMError, ValueError):
    """The requested mode is not supported by the waveguide at this frequency."""


class OrderError(QPMError, ValueError):
    """Grating order not registered with the poling specification."""


class NonPhysicalPairError(QPMError, ValueError):
    """Signal/idler wavelengths that violate energy conservation."""


class NoSolutionError(QPMError):
    """No phase-matching solution exists for the requested grating order."""


class ConfigError(QPMError, ValueError):
    """Invalid run configuration (file or command-line)."""
