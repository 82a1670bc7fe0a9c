"""Exception types shared across the toolkit."""


class StimwaveError(Exception):
    """Base class for all toolkit errors."""


class ParameterError(StimwaveError, ValueError):
    """A synthesis or model parameter is out of its valid domain."""


class ClippingError(StimwaveError, ValueError):
    """An operation would push samples beyond full scale; never clipped silently."""


class ProgramError(StimwaveError, ValueError):
    """A stimulation program failed to parse or validate.

    ``message`` should name the offending field path (e.g. ``segments[1].duration_s``).
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report  # optional safety ValidationReport


class FitError(StimwaveError, ValueError):
    """Curve fitting received degenerate input or produced an invalid model."""


class WavFormatError(StimwaveError, ValueError):
    """A WAV byte stream is malformed or uses an unsupported layout."""


class SinkError(StimwaveError, RuntimeError):
    """An audio sink is unavailable or its usage contract was violated."""
