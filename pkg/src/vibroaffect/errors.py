"""Exception types shared across the package."""


class VibroAffectError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(VibroAffectError):
    """A config file, template, lexicon, or phrase set is missing or invalid."""


class InputError(VibroAffectError):
    """Caller-supplied value violates a precondition (empty text, bad range, ...)."""


class AliasingError(InputError):
    """Requested tone frequency is at or above the Nyquist limit."""


class ParseError(VibroAffectError):
    """Estimator reply did not match the expected percentage format.

    Carries the raw reply text in ``raw`` for diagnostics.
    """

    def __init__(self, message: str, raw: str = ""):
        super().__init__(message)
        self.raw = raw


class TransportError(VibroAffectError):
    """The remote estimator endpoint could not be reached or broke protocol."""


class EstimationError(VibroAffectError):
    """All estimation attempts failed.

    ``cause`` is ``"transport"`` or ``"parse"`` depending on the last failure;
    ``attempts`` counts the requests actually made.
    """

    def __init__(self, message: str, cause: str, attempts: int):
        super().__init__(message)
        self.cause = cause
        self.attempts = attempts


class DeviceError(VibroAffectError):
    """No usable audio output device."""


class StateError(VibroAffectError):
    """Operation not legal in the current session or record state."""
