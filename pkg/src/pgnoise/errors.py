"""Exception hierarchy. Everything raised on purpose derives from PgNoiseError."""


class PgNoiseError(Exception):
    pass


class InvalidInputError(PgNoiseError, ValueError):
    """Non-finite, out-of-range or malformed caller input."""


class EmptyDataError(PgNoiseError, ValueError):
    """An operation that needs data received none."""


class InsufficientDynamicRangeError(PgNoiseError, ValueError):
    """Too few populated intensity bins to fit the variance law."""


class DegenerateFitError(PgNoiseError, ValueError):
    """Line fit requested on points with no spread in the abscissa."""


class CalibrationError(PgNoiseError):
    """A channel could not be calibrated (e.g. no positive gain estimates)."""

    def __init__(self, message, channel=None):
        super().__init__(message)
        self.channel = channel


class SamplingExhaustedError(PgNoiseError):
    """Parameter resampling hit the attempt cap without a non-negative variance."""

    def __init__(self, message, attempts=None, channel=None):
        super().__init__(message)
        self.attempts = attempts
        self.channel = channel


class BundleError(PgNoiseError):
    """Base for parameter-bundle serialization problems."""


class BundleParseError(BundleError):
    """Input is not syntactically a bundle file."""


class BundleVersionError(BundleError):
    """Bundle declares a format version this code does not understand."""


class BundleValidationError(BundleError):
    """Syntactically valid bundle violating an invariant; `path` names the field."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class ImageIOError(PgNoiseError):
    """Unreadable, unsupported or unwritable image file."""
