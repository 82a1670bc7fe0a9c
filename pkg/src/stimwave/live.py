"""Live parameter control: a pulse train generated incrementally, updated on the fly.

The session is a deterministic chunk generator. Parameter updates never cut a
pulse: an update staged while a pulse is in flight (or between pulses) takes
effect at the next pulse onset, where the onset accumulator is rebased so the
new frequency's spacing starts there. A regular stop lets the in-flight pulse
finish and then emits silence; an emergency stop zeroes the output from the
very next sample and latches until explicitly re-armed.

Every state change reports the absolute sample position where it acts, so a
recorded history of (position, update) pairs replayed into a fresh session
reproduces the streamed signal bit for bit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import ClippingError, ParameterError
from .safety import DEFAULT_ENVELOPE, SafetyEnvelope, ValidationReport, clamp, validate
from .synth import (
    PULSE_SHAPES,
    PulseTrainParams,
    RussianParams,
    Shape,
    WaveformSpec,
    check_pulse_fits_period,
    effective_scale,
    russian_burst,
    synth_pulse,
)
from .units import round_count

Params = Union[PulseTrainParams, RussianParams]


class RunState(str, enum.Enum):
    IDLE = "idle"
    RUNNING = "running"
    STOPPED_EMERGENCY = "stopped_emergency"


@dataclass(frozen=True)
class LiveUpdate:
    """Replacement spec and/or params; None keeps the current value."""

    spec: Optional[WaveformSpec] = None
    params: Optional[Params] = None


@dataclass(frozen=True)
class UpdateResult:
    """What an update did: the values actually applied and when they sound.

    ``effective_sample`` is the pulse onset at which the new parameters first
    shape the output (equal to the staging position when the session is not
    running). ``refused`` updates leave the session untouched.
    """

    spec: WaveformSpec
    params: Params
    report: Optional[ValidationReport]
    effective_sample: int
    clamped: bool = False
    refused: bool = False
    reason: Optional[str] = None


@dataclass(frozen=True)
class SessionState:
    """Immutable status snapshot. uptime_s counts stream time, not wall time."""

    run_state: RunState
    spec: WaveformSpec
    params: Params
    envelope: SafetyEnvelope
    sample_rate_hz: int
    samples_emitted: int
    last_validation: Optional[ValidationReport]

    @property
    def uptime_s(self) -> float:
        return self.samples_emitted / self.sample_rate_hz


def _check_spec_params(spec: WaveformSpec, params: Params) -> None:
    """Everything that must hold before a unit can be rendered, checked up front
    so a bad update is refused instead of blowing up mid-stream."""
    if isinstance(params, RussianParams) != (spec.shape is Shape.RUSSIAN):
        raise ParameterError("russian shape requires RussianParams and vice versa")
    if spec.shape not in PULSE_SHAPES and spec.shape is not Shape.RUSSIAN:
        raise ParameterError(f"live sessions support pulse shapes and russian, "
                             f"not {spec.shape.value}")
    if spec.shape in PULSE_SHAPES:
        check_pulse_fits_period(spec, params)
    effective_scale(params.amplitude, params.gain_db)  # ClippingError if too hot


class LiveSession:
    """Deterministic live stream with pulse-boundary parameter updates."""

    def __init__(
        self,
        spec: WaveformSpec,
        params: Params,
        sample_rate_hz: int,
        envelope: SafetyEnvelope = DEFAULT_ENVELOPE,
        clamp_mode: bool = False,
    ):
        if int(sample_rate_hz) != sample_rate_hz or sample_rate_hz <= 0:
            raise ParameterError(f"sample_rate_hz must be a positive integer, got {sample_rate_hz!r}")
        _check_spec_params(spec, params)
        self.sample_rate_hz = int(sample_rate_hz)
        self.envelope = envelope
        self.clamp_mode = bool(clamp_mode)
        report = validate(spec, params, envelope)
        if not report.ok:
            raise ParameterError(f"initial parameters rejected:\n{report.summary()}")
        self.spec = spec
        self.params = params
        self.last_validation: Optional[ValidationReport] = report
        self.run_state = RunState.IDLE
        self.position = 0            # absolute samples emitted so far
        self._tail = np.empty(0)     # unemitted remainder of the in-flight unit
        self._base = 0               # onset accumulator origin (absolute sample)
        self._k = 0                  # units emitted since the last rebase
        self._staged: Optional[tuple] = None  # (spec, params) awaiting next onset
        self._unit_cache: Optional[tuple] = None

    # -- internals ----------------------------------------------------------

    def _unit(self) -> np.ndarray:
        """Rendered repeating unit (whole pulse or whole burst) for current params."""
        key = (self.spec, self.params)
        if self._unit_cache is None or self._unit_cache[0] != key:
            if self.spec.shape is Shape.RUSSIAN:
                unit = russian_burst(self.params, self.sample_rate_hz)
            else:
                unit = synth_pulse(self.spec, self.params, self.sample_rate_hz).samples
            self._unit_cache = (key, unit)
        return self._unit_cache[1]

    def _unit_rate_hz(self) -> float:
        if isinstance(self.params, RussianParams):
            return self.params.burst_rate_hz
        return self.params.frequency_hz

    def _next_onset(self) -> int:
        return self._base + round_count(self._k * self.sample_rate_hz / self._unit_rate_hz())

    def _apply_staged_at(self, onset: int) -> None:
        spec, params = self._staged
        self._staged = None
        self.spec = spec
        self.params = params
        self._base = onset
        self._k = 0

    # -- streaming ------------------------------------------------------------

    def next_chunk(self, n: int) -> np.ndarray:
        """Emit the next n samples of the stream.

        Zeros while idle or emergency-stopped (an in-flight pulse still
        drains after a regular stop); pulses at drift-free onsets while
        running. Parameter changes are only ever visible at onsets.
        """
        if n < 0:
            raise ParameterError(f"chunk size must be >= 0, got {n}")
        out = np.zeros(n)
        i = 0
        while i < n:
            if self._tail.size:
                take = min(self._tail.size, n - i)
                out[i:i + take] = self._tail[:take]
                self._tail = self._tail[take:]
                i += take
                continue
            if self.run_state is not RunState.RUNNING:
                break  # rest of the chunk stays zero
            onset = self._next_onset()
            p = self.position + i
            if onset > p:
                i += min(onset - p, n - i)
                p = self.position + i
                if p < onset:
                    break  # onset lies beyond this chunk
            if self._staged is not None:
                self._apply_staged_at(p)
            self._tail = self._unit()
            self._k += 1
        self.position += n
        return out

    # -- control --------------------------------------------------------------

    def apply_update(self, update: LiveUpdate) -> UpdateResult:
        """Stage new parameters; they sound from the next pulse onset.

        In clamp mode out-of-envelope values are moved to the nearest hard
        bound first; otherwise a safety rejection refuses the update and the
        session keeps streaming under the old parameters. Refused results
        carry the report; applied results carry the (possibly clamped)
        values and the onset where they take effect.
        """
        if self.run_state is RunState.STOPPED_EMERGENCY:
            return UpdateResult(self.spec, self.params, None, self.position,
                                refused=True, reason="emergency stop latched; rearm first")
        spec = update.spec if update.spec is not None else self.spec
        params = update.params if update.params is not None else self.params
        clamped = False
        if self.clamp_mode:
            adjusted = clamp(spec, params, self.envelope)
            clamped = adjusted is not params
            params = adjusted
        try:
            _check_spec_params(spec, params)
        except (ParameterError, ClippingError) as exc:
            return UpdateResult(self.spec, self.params, None, self.position,
                                refused=True, reason=str(exc))
        report = validate(spec, params, self.envelope)
        if not report.ok:
            return UpdateResult(self.spec, self.params, report, self.position,
                                refused=True, reason="rejected by safety validation")
        self.last_validation = report
        if self.run_state is RunState.RUNNING:
            effective = self._next_onset()
            self._staged = (spec, params)
        else:
            effective = self.position
            self.spec = spec
            self.params = params
        return UpdateResult(spec, params, report, effective, clamped=clamped)

    def start(self) -> int:
        """Begin the train; the first onset is the current position."""
        if self.run_state is RunState.STOPPED_EMERGENCY:
            raise ParameterError("emergency stop latched; rearm first")
        if self.run_state is RunState.RUNNING:
            raise ParameterError("already running")
        self.run_state = RunState.RUNNING
        self._base = self.position
        self._k = 0
        return self.position

    def stop(self) -> int:
        """Stop scheduling new pulses; returns the sample from which output is silent.

        The in-flight pulse (both phases) still completes, so the returned
        position is the end of that pulse, or the current position if the
        stream is between pulses.
        """
        if self.run_state is RunState.RUNNING:
            self.run_state = RunState.IDLE
        if self._staged is not None:
            # never applied at an onset; becomes current for the next start
            self.spec, self.params = self._staged
            self._staged = None
        return self.position + self._tail.size

    def emergency_stop(self) -> int:
        """Zero output from the next sample, truncating any in-flight pulse."""
        self.run_state = RunState.STOPPED_EMERGENCY
        self._tail = np.empty(0)
        self._staged = None
        return self.position

    def rearm(self) -> None:
        """Clear the emergency latch; the session returns to idle."""
        if self.run_state is RunState.STOPPED_EMERGENCY:
            self.run_state = RunState.IDLE

    def status(self) -> SessionState:
        return SessionState(
            run_state=self.run_state,
            spec=self.spec,
            params=self.params,
            envelope=self.envelope,
            sample_rate_hz=self.sample_rate_hz,
            samples_emitted=self.position,
            last_validation=self.last_validation,
        )
