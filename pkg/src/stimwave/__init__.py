"""Sample-accurate synthesis, validation, and live control of EMS waveforms.

The package splits into offline and live halves. Offline: build a
WaveformSpec + parameters, render with render_train / render_russian /
render_arbitrary or a whole StimulationProgram, check the result with
validate() and analyze(), and write it with write_wav. Live: a LiveSession
streams chunk by chunk with sample-accurate parameter updates, and
ControlService exposes it over a line-based TCP protocol that ControlClient
(or the bundled web UI) speaks.
"""

from .analysis import AnalysisReport, analyze
from .buffer import SampleBuffer
from .calibration import (
    DEFAULT_GAINS_DB,
    GainTable,
    apply_gain,
    default_gain_db,
    normalize_rms,
    signal_rms,
)
from .errors import (
    ClippingError,
    FitError,
    ParameterError,
    ProgramError,
    SinkError,
    StimwaveError,
    WavFormatError,
)
from .live import LiveSession, LiveUpdate, RunState, SessionState, UpdateResult
from .physiology import (
    SDFit,
    SDModel,
    fit_sd_model,
    predicts_activation,
    sd_curve,
    threshold_amplitude,
)
from .program import (
    Segment,
    StimulationProgram,
    load_program,
    parse_program,
    render_program,
)
from .safety import (
    DEFAULT_ENVELOPE,
    Finding,
    SafetyEnvelope,
    Severity,
    ValidationReport,
    Verdict,
    clamp,
    validate,
)
from .service import ControlClient, ControlService, ServiceConfig
from .sinks import AudioSink, DeviceSink, FileSink, NullSink, SinkConfig, open_sink
from .synth import (
    Polarity,
    PulseTrainParams,
    RussianParams,
    Shape,
    WaveformSpec,
    render_arbitrary,
    render_russian,
    render_train,
    synth_pulse,
)
from .wavio import (
    Encoding,
    WavFormat,
    decode_wav,
    encode_wav,
    read_wav,
    write_wav,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport",
    "AudioSink",
    "ClippingError",
    "ControlClient",
    "ControlService",
    "DEFAULT_ENVELOPE",
    "DEFAULT_GAINS_DB",
    "DeviceSink",
    "Encoding",
    "FileSink",
    "Finding",
    "FitError",
    "GainTable",
    "LiveSession",
    "LiveUpdate",
    "NullSink",
    "ParameterError",
    "Polarity",
    "ProgramError",
    "PulseTrainParams",
    "RunState",
    "RussianParams",
    "SDFit",
    "SDModel",
    "SafetyEnvelope",
    "SampleBuffer",
    "Segment",
    "ServiceConfig",
    "SessionState",
    "Severity",
    "Shape",
    "SinkConfig",
    "SinkError",
    "StimulationProgram",
    "StimwaveError",
    "UpdateResult",
    "ValidationReport",
    "Verdict",
    "WavFormat",
    "WavFormatError",
    "WaveformSpec",
    "analyze",
    "apply_gain",
    "clamp",
    "decode_wav",
    "default_gain_db",
    "encode_wav",
    "fit_sd_model",
    "load_program",
    "normalize_rms",
    "open_sink",
    "parse_program",
    "predicts_activation",
    "read_wav",
    "render_arbitrary",
    "render_program",
    "render_russian",
    "render_train",
    "sd_curve",
    "signal_rms",
    "synth_pulse",
    "threshold_amplitude",
    "validate",
    "write_wav",
]
