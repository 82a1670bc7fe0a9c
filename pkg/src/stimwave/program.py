"""Declarative stimulation programs: an ordered list of timed segments.

A program file is YAML with a version, an optional safety envelope override,
and one or more segments. Each segment names a waveform, its parameters, a
duration, and optional amplitude ramps. Programs are safety-validated when
constructed, so a StimulationProgram in hand is always renderable.

Schema (all per-segment fields except shape, frequency_hz/carrier timing and
duration_s are optional):

    version: 1
    envelope:                  # optional; fields of SafetyEnvelope
      freq_hard: [1, 500]
    segments:
      - shape: square          # square | sine | triangle | saw | russian
        polarity: biphasic     # monophasic (default) | biphasic
        frequency_hz: 100
        pulse_width_us: 200
        interphase_gap_us: 0
        amplitude: 0.8         # 0..1 fraction of full scale
        gain_db: 0
        duration_s: 10
        ramp_in_s: 1
        ramp_out_s: 1
      - shape: russian         # uses carrier timing instead of freq/width
        carrier_hz: 2500
        burst_ms: 10
        interburst_ms: 10
        amplitude: 1.0
        duration_s: 5
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
import yaml

from .buffer import SampleBuffer
from .errors import ParameterError, ProgramError
from .safety import DEFAULT_ENVELOPE, SafetyEnvelope, ValidationReport, validate
from .synth import (
    PULSE_SHAPES,
    Polarity,
    PulseTrainParams,
    RussianParams,
    Shape,
    WaveformSpec,
    check_pulse_fits_period,
    russian_burst,
    synth_pulse,
    train_onsets,
)
from .units import round_count

PROGRAM_VERSION = 1

Params = Union[PulseTrainParams, RussianParams]


@dataclass(frozen=True)
class Segment:
    """One timed stretch of a program: a waveform plus duration and ramps.

    Ramps are linear amplitude envelopes applied per whole pulse: a pulse is
    scaled by the ramp value at its onset and keeps its shape, so charge
    balance survives ramping.
    """

    spec: WaveformSpec
    params: Params
    duration_s: float
    ramp_in_s: float = 0.0
    ramp_out_s: float = 0.0

    def __post_init__(self):
        if isinstance(self.params, RussianParams) != (self.spec.shape is Shape.RUSSIAN):
            raise ParameterError("russian shape requires RussianParams and vice versa")
        if self.spec.shape not in PULSE_SHAPES and self.spec.shape is not Shape.RUSSIAN:
            raise ParameterError(
                f"programs support pulse shapes and russian, not {self.spec.shape.value}")
        if not (self.duration_s > 0 and np.isfinite(self.duration_s)):
            raise ParameterError(f"duration_s must be > 0, got {self.duration_s}")
        if self.ramp_in_s < 0 or self.ramp_out_s < 0:
            raise ParameterError("ramps must be >= 0")
        if self.ramp_in_s + self.ramp_out_s > self.duration_s:
            raise ParameterError(
                f"ramps ({self.ramp_in_s:g}+{self.ramp_out_s:g} s) exceed "
                f"segment duration {self.duration_s:g} s")
        if self.spec.shape in PULSE_SHAPES:
            check_pulse_fits_period(self.spec, self.params)

    def ramp_scale(self, t_s: float) -> float:
        """Amplitude factor for a pulse whose onset falls t_s into the segment."""
        scale = 1.0
        if self.ramp_in_s > 0:
            scale = min(scale, t_s / self.ramp_in_s)
        if self.ramp_out_s > 0:
            scale = min(scale, (self.duration_s - t_s) / self.ramp_out_s)
        return max(0.0, min(1.0, scale))


@dataclass(frozen=True)
class StimulationProgram:
    """A validated sequence of segments plus the envelope they were checked against."""

    segments: tuple
    envelope: SafetyEnvelope = DEFAULT_ENVELOPE
    validation: tuple = ()  # per-segment ValidationReport, same order

    def __post_init__(self):
        segments = tuple(self.segments)
        if not segments:
            raise ProgramError("program has no segments")
        object.__setattr__(self, "segments", segments)
        reports = []
        for i, seg in enumerate(segments):
            report = validate(seg.spec, seg.params, self.envelope, duration_s=seg.duration_s)
            reports.append(report)
            if not report.ok:
                raise ProgramError(
                    f"segments[{i}] rejected by safety validation:\n{report.summary()}",
                    report=report)
        object.__setattr__(self, "validation", tuple(reports))

    @property
    def total_duration_s(self) -> float:
        return sum(seg.duration_s for seg in self.segments)

    @property
    def warnings(self) -> tuple:
        return tuple(
            (i, f) for i, report in enumerate(self.validation) for f in report.findings)


# --- parsing ---------------------------------------------------------------

_SEGMENT_FIELDS_COMMON = {"shape", "amplitude", "gain_db", "duration_s",
                          "ramp_in_s", "ramp_out_s"}
_SEGMENT_FIELDS_PULSE = {"polarity", "frequency_hz", "pulse_width_us", "interphase_gap_us"}
_SEGMENT_FIELDS_RUSSIAN = {"carrier_hz", "burst_ms", "interburst_ms"}

_MISSING = object()


class _Node:
    """A YAML node paired with its field path, for error messages with both."""

    def __init__(self, node, path: str):
        self.node = node
        self.path = path

    @property
    def line(self) -> int:
        return self.node.start_mark.line + 1

    def fail(self, message: str):
        raise ProgramError(f"{self.path} (line {self.line}): {message}")

    def mapping(self) -> dict:
        if not isinstance(self.node, yaml.MappingNode):
            self.fail("expected a mapping")
        out = {}
        for key_node, value_node in self.node.value:
            key = str(key_node.value)
            out[key] = _Node(value_node, f"{self.path}.{key}" if self.path else key)
        return out

    def sequence(self) -> list:
        if not isinstance(self.node, yaml.SequenceNode):
            self.fail("expected a list")
        return [_Node(item, f"{self.path}[{i}]") for i, item in enumerate(self.node.value)]

    def value(self):
        try:
            return yaml.SafeLoader("").construct_object(self.node, deep=True)
        except yaml.YAMLError as exc:
            self.fail(str(exc))

    def number(self) -> float:
        v = self.value()
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.fail(f"expected a number, got {v!r}")
        return float(v)

    def string(self) -> str:
        v = self.value()
        if not isinstance(v, str):
            self.fail(f"expected a string, got {v!r}")
        return v


def _take_number(fields: dict, name: str, owner: _Node, default=_MISSING) -> float:
    node = fields.pop(name, None)
    if node is None:
        if default is _MISSING:
            owner.fail(f"missing required field '{name}'")
        return default
    return node.number()


def _parse_segment(seg_node: _Node) -> Segment:
    fields = seg_node.mapping()
    shape_node = fields.pop("shape", None)
    if shape_node is None:
        seg_node.fail("missing required field 'shape'")
    try:
        shape = Shape(shape_node.string())
    except ValueError:
        shape_node.fail(f"unknown shape {shape_node.value()!r}")
    if shape not in PULSE_SHAPES and shape is not Shape.RUSSIAN:
        shape_node.fail(f"shape {shape.value!r} is not valid in a program file")

    amplitude = _take_number(fields, "amplitude", seg_node, 1.0)
    gain_db = _take_number(fields, "gain_db", seg_node, 0.0)
    duration_s = _take_number(fields, "duration_s", seg_node)
    ramp_in_s = _take_number(fields, "ramp_in_s", seg_node, 0.0)
    ramp_out_s = _take_number(fields, "ramp_out_s", seg_node, 0.0)

    try:
        if shape is Shape.RUSSIAN:
            allowed = _SEGMENT_FIELDS_COMMON | _SEGMENT_FIELDS_RUSSIAN
            params = RussianParams(
                carrier_hz=_take_number(fields, "carrier_hz", seg_node, 2500.0),
                burst_ms=_take_number(fields, "burst_ms", seg_node, 10.0),
                interburst_ms=_take_number(fields, "interburst_ms", seg_node, 10.0),
                amplitude=amplitude,
                gain_db=gain_db,
            )
            spec = WaveformSpec(Shape.RUSSIAN)
        else:
            allowed = _SEGMENT_FIELDS_COMMON | _SEGMENT_FIELDS_PULSE
            polarity_node = fields.pop("polarity", None)
            if polarity_node is None:
                polarity = Polarity.MONOPHASIC
            else:
                try:
                    polarity = Polarity(polarity_node.string())
                except ValueError:
                    polarity_node.fail(f"unknown polarity {polarity_node.value()!r}")
            params = PulseTrainParams(
                frequency_hz=_take_number(fields, "frequency_hz", seg_node),
                pulse_width_us=_take_number(fields, "pulse_width_us", seg_node),
                amplitude=amplitude,
                gain_db=gain_db,
            )
            spec = WaveformSpec(
                shape, polarity,
                interphase_gap_us=_take_number(fields, "interphase_gap_us", seg_node, 0.0),
            )
        if fields:
            stray = sorted(fields)[0]
            fields[stray].fail(f"unknown field '{stray}' for shape {shape.value!r} "
                               f"(allowed: {', '.join(sorted(allowed))})")
        return Segment(spec, params, duration_s, ramp_in_s, ramp_out_s)
    except ParameterError as exc:
        raise ProgramError(f"{seg_node.path} (line {seg_node.line}): {exc}") from exc


def parse_program(text: str) -> StimulationProgram:
    """Parse and validate program text.

    Every error names what failed and where: YAML syntax errors carry the
    line, field errors carry the field path and the line of the offending
    node, and safety rejections carry the ValidationReport.
    """
    try:
        root = yaml.compose(text)
    except yaml.MarkedYAMLError as exc:
        line = exc.problem_mark.line + 1 if exc.problem_mark else "?"
        raise ProgramError(f"line {line}: {exc.problem}") from exc
    except yaml.YAMLError as exc:
        raise ProgramError(f"program is not valid YAML: {exc}") from exc
    if root is None:
        raise ProgramError("program is empty")

    top = _Node(root, "").mapping()

    version_node = top.pop("version", None)
    if version_node is None:
        raise ProgramError("missing required field 'version'")
    if version_node.value() != PROGRAM_VERSION:
        version_node.fail(f"unsupported program version {version_node.value()!r} "
                          f"(this build reads version {PROGRAM_VERSION})")

    envelope = DEFAULT_ENVELOPE
    envelope_node = top.pop("envelope", None)
    if envelope_node is not None:
        try:
            envelope = SafetyEnvelope.from_dict(envelope_node.value())
        except (ParameterError, TypeError) as exc:
            envelope_node.fail(str(exc))

    segments_node = top.pop("segments", None)
    if top:
        stray = sorted(top)[0]
        top[stray].fail(f"unknown top-level field '{stray}'")
    if segments_node is None:
        raise ProgramError("program has no segments")
    seg_nodes = segments_node.sequence()
    if not seg_nodes:
        raise ProgramError("program has no segments")

    segments = [_parse_segment(node) for node in seg_nodes]
    return StimulationProgram(tuple(segments), envelope)


def load_program(path) -> StimulationProgram:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_program(fh.read())


# --- rendering ---------------------------------------------------------------

def _segment_units(seg: Segment, sample_rate_hz: int):
    """The repeating unit (pulse or burst) and its repetition rate."""
    if seg.spec.shape is Shape.RUSSIAN:
        return russian_burst(seg.params, sample_rate_hz), seg.params.burst_rate_hz
    return synth_pulse(seg.spec, seg.params, sample_rate_hz).samples, seg.params.frequency_hz


def render_segment_into(out: np.ndarray, seg: Segment, start: int, end: int,
                        sample_rate_hz: int) -> None:
    """Render one segment into out[start:end] (exact zeros elsewhere)."""
    unit, rate_hz = _segment_units(seg, sample_rate_hz)
    span = end - start
    for onset in train_onsets(rate_hz, sample_rate_hz, span, len(unit)):
        scale = seg.ramp_scale(onset / sample_rate_hz)
        out[start + onset: start + onset + len(unit)] = scale * unit


def render_program(program: StimulationProgram, sample_rate_hz: int) -> SampleBuffer:
    """Render every segment back to back into one buffer.

    Segment boundaries sit at round(cumulative_duration * rate), so the total
    length is within one sample of the declared duration no matter how many
    segments there are. Pulses never straddle a boundary; ramp scaling is the
    ramp value at each pulse's onset.
    """
    boundaries = [0]
    cumulative = 0.0
    for seg in program.segments:
        cumulative += seg.duration_s
        boundaries.append(round_count(cumulative * sample_rate_hz))
    out = np.zeros(boundaries[-1])
    for seg, start, end in zip(program.segments, boundaries, boundaries[1:]):
        render_segment_into(out, seg, start, end, sample_rate_hz)
    return SampleBuffer(sample_rate_hz, out)
