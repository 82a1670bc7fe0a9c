"""Sample-accurate synthesis of stimulation pulses, pulse trains, and burst carriers.

Conventions
-----------
* One *phase* of a pulse lasts ``pulse_width_us`` and is quantized to
  ``n = round(width * rate)`` samples (minimum 1). Sample ``k`` takes the
  shape's value at fractional position ``k / n`` of the phase, so a half-sine
  phase is ``A * sin(pi * k / n)`` and its discrete RMS is exactly ``A/sqrt(2)``.
* Biphasic pulses are the positive phase, an optional interphase gap of exact
  zeros, then the sample-wise negation of the positive phase; net charge per
  pulse is exactly zero by construction.
* Pulse/burst onsets come from a drift-free accumulator,
  ``onset_k = round(k * rate / frequency)``, so onset ``k`` never deviates from
  ``k / frequency`` seconds by as much as one sample.
* Amplitude is a fraction of digital full scale; gain is applied after shaping
  and an effective peak above full scale is an error, never a silent clip.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .buffer import FULL_SCALE_TOLERANCE, SampleBuffer
from .errors import ClippingError, ParameterError
from .units import db_to_linear, round_count


class Shape(str, enum.Enum):
    SINE = "sine"
    TRIANGLE = "triangle"
    SAW = "saw"
    SQUARE = "square"
    RUSSIAN = "russian"
    ARBITRARY = "arbitrary"


class Polarity(str, enum.Enum):
    MONOPHASIC = "monophasic"
    BIPHASIC = "biphasic"


PULSE_SHAPES = (Shape.SINE, Shape.TRIANGLE, Shape.SAW, Shape.SQUARE)


@dataclass(frozen=True)
class WaveformSpec:
    """Which waveform family to synthesize and its shape-specific structure.

    ``table`` (one normalized period, values in [-1, 1], length >= 2) is
    required for ``arbitrary`` and forbidden otherwise. ``interphase_gap_us``
    only applies to biphasic pulses.
    """

    shape: Shape
    polarity: Polarity = Polarity.MONOPHASIC
    interphase_gap_us: float = 0.0
    table: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "shape", Shape(self.shape))
        object.__setattr__(self, "polarity", Polarity(self.polarity))
        if self.interphase_gap_us < 0:
            raise ParameterError("interphase_gap_us must be >= 0")
        if self.polarity is not Polarity.BIPHASIC and self.interphase_gap_us != 0:
            raise ParameterError("interphase_gap_us requires biphasic polarity")
        if self.shape is Shape.ARBITRARY:
            if self.table is None:
                raise ParameterError("arbitrary shape requires a table")
            table = tuple(float(v) for v in self.table)
            if len(table) < 2:
                raise ParameterError(f"table must have at least 2 entries, got {len(table)}")
            if any(not np.isfinite(v) or abs(v) > 1.0 for v in table):
                raise ParameterError("table values must be finite and within [-1, +1]")
            object.__setattr__(self, "table", table)
        elif self.table is not None:
            raise ParameterError(f"table is only valid for arbitrary shape, not {self.shape.value}")


@dataclass(frozen=True)
class PulseTrainParams:
    """Repetition rate, per-phase width, and level of a pulse train."""

    frequency_hz: float
    pulse_width_us: float
    amplitude: float = 1.0
    gain_db: float = 0.0

    def __post_init__(self):
        if not (self.frequency_hz > 0 and np.isfinite(self.frequency_hz)):
            raise ParameterError(f"frequency_hz must be > 0, got {self.frequency_hz}")
        if not (self.pulse_width_us > 0 and np.isfinite(self.pulse_width_us)):
            raise ParameterError(f"pulse_width_us must be > 0, got {self.pulse_width_us}")
        if not (0.0 <= self.amplitude <= 1.0):
            raise ParameterError(f"amplitude must be within [0, 1], got {self.amplitude}")
        if not np.isfinite(self.gain_db):
            raise ParameterError(f"gain_db must be finite, got {self.gain_db}")

    @property
    def period_us(self) -> float:
        return 1e6 / self.frequency_hz


@dataclass(frozen=True)
class RussianParams:
    """Burst-modulated sine carrier: 2.5 kHz bursts gated on/off in milliseconds.

    Defaults give the classical pattern: 10 ms on / 10 ms off, i.e. a 50 Hz
    burst rate at 50% duty.
    """

    carrier_hz: float = 2500.0
    burst_ms: float = 10.0
    interburst_ms: float = 10.0
    amplitude: float = 1.0
    gain_db: float = 0.0

    def __post_init__(self):
        if not (self.carrier_hz > 0 and np.isfinite(self.carrier_hz)):
            raise ParameterError(f"carrier_hz must be > 0, got {self.carrier_hz}")
        if not (self.burst_ms > 0 and np.isfinite(self.burst_ms)):
            raise ParameterError(f"burst_ms must be > 0, got {self.burst_ms}")
        if not (self.interburst_ms >= 0 and np.isfinite(self.interburst_ms)):
            raise ParameterError(f"interburst_ms must be >= 0, got {self.interburst_ms}")
        if not (0.0 <= self.amplitude <= 1.0):
            raise ParameterError(f"amplitude must be within [0, 1], got {self.amplitude}")
        if not np.isfinite(self.gain_db):
            raise ParameterError(f"gain_db must be finite, got {self.gain_db}")

    @property
    def burst_rate_hz(self) -> float:
        return 1000.0 / (self.burst_ms + self.interburst_ms)

    @property
    def duty(self) -> float:
        return self.burst_ms / (self.burst_ms + self.interburst_ms)


def effective_scale(amplitude: float, gain_db: float) -> float:
    """Peak level after shaping and gain; errors if it would exceed full scale."""
    scale = amplitude * db_to_linear(gain_db)
    if scale > 1.0 + FULL_SCALE_TOLERANCE:
        raise ClippingError(
            f"amplitude {amplitude} at {gain_db:+g} dB gives peak {scale:.6g} > full scale"
        )
    return min(scale, 1.0)


def phase_sample_count(pulse_width_us: float, sample_rate_hz: int) -> int:
    """Samples in one phase: round(width * rate), never below 1."""
    return max(1, round_count(pulse_width_us * 1e-6 * sample_rate_hz))


def check_pulse_fits_period(spec: WaveformSpec, params: PulseTrainParams) -> None:
    """Raise unless the whole pulse (both phases plus gap) fits inside one period."""
    period_us = params.period_us
    if spec.polarity is Polarity.BIPHASIC:
        occupied = 2.0 * params.pulse_width_us + spec.interphase_gap_us
    else:
        occupied = params.pulse_width_us
    if occupied >= period_us:
        raise ParameterError(
            f"pulse occupies {occupied:g} us but the period at "
            f"{params.frequency_hz:g} Hz is only {period_us:g} us"
        )


def _phase_shape(shape: Shape, n: int) -> np.ndarray:
    """Unit-amplitude positive phase of n samples, evaluated at k/n."""
    k = np.arange(n, dtype=np.float64)
    if shape is Shape.SQUARE:
        return np.ones(n)
    if shape is Shape.SINE:
        return np.sin(np.pi * k / n)
    if shape is Shape.TRIANGLE:
        return 1.0 - np.abs(2.0 * k / n - 1.0)
    if shape is Shape.SAW:
        return k / n
    raise ParameterError(f"{shape.value} is not a pulse shape")


def synth_pulse(spec: WaveformSpec, params: PulseTrainParams, sample_rate_hz: int) -> SampleBuffer:
    """Render a single stimulation pulse.

    Monophasic: one positive phase. Biphasic: positive phase, interphase gap
    of exact zeros, then the sample-wise negation of the positive phase.

    Args:
        spec: pulse shape and polarity (``russian``/``arbitrary`` are rejected;
            they are periodic waveforms, not pulses).
        params: repetition/level parameters; only width, amplitude, and gain
            are used here.
        sample_rate_hz: output rate in Hz.

    Returns:
        SampleBuffer holding exactly one pulse.
    """
    if spec.shape not in PULSE_SHAPES:
        raise ParameterError(f"synth_pulse handles pulse shapes only, not {spec.shape.value}")
    check_pulse_fits_period(spec, params)
    scale = effective_scale(params.amplitude, params.gain_db)
    n = phase_sample_count(params.pulse_width_us, sample_rate_hz)
    phase = scale * _phase_shape(spec.shape, n)
    if spec.polarity is Polarity.BIPHASIC:
        gap = np.zeros(round_count(spec.interphase_gap_us * 1e-6 * sample_rate_hz))
        samples = np.concatenate([phase, gap, -phase])
    else:
        samples = phase
    return SampleBuffer(sample_rate_hz, samples)


def train_onsets(frequency_hz: float, sample_rate_hz: int, total_samples: int, pulse_len: int):
    """Yield drift-free pulse onset indices whose pulses fit inside the buffer."""
    k = 0
    while True:
        onset = round_count(k * sample_rate_hz / frequency_hz)
        if onset + pulse_len > total_samples:
            return
        yield onset
        k += 1


def render_train(
    spec: WaveformSpec,
    params: PulseTrainParams,
    duration_s: float,
    sample_rate_hz: int,
) -> SampleBuffer:
    """Render a pulse train of the given duration.

    Pulses are placed at ``round(k * rate / frequency)`` so the long-run mean
    period is exact; inter-pulse samples are exact zeros. Only complete pulses
    are emitted: a pulse that would overrun the buffer is dropped, which keeps
    every rendered pulse charge-balanced.
    """
    if duration_s < 0:
        raise ParameterError(f"duration_s must be >= 0, got {duration_s}")
    total = round_count(duration_s * sample_rate_hz)
    pulse = synth_pulse(spec, params, sample_rate_hz).samples
    out = np.zeros(total)
    for onset in train_onsets(params.frequency_hz, sample_rate_hz, total, len(pulse)):
        out[onset : onset + len(pulse)] = pulse
    return SampleBuffer(sample_rate_hz, out)


def russian_burst(rp: RussianParams, sample_rate_hz: int) -> np.ndarray:
    """One burst: a sine at the carrier frequency, phase reset to 0 at burst start."""
    if rp.carrier_hz >= sample_rate_hz / 2:
        raise ParameterError(
            f"carrier {rp.carrier_hz:g} Hz is not resolvable at {sample_rate_hz} Hz "
            f"(Nyquist {sample_rate_hz / 2:g} Hz)"
        )
    scale = effective_scale(rp.amplitude, rp.gain_db)
    n = max(1, round_count(rp.burst_ms * 1e-3 * sample_rate_hz))
    j = np.arange(n, dtype=np.float64)
    return scale * np.sin(2.0 * np.pi * rp.carrier_hz * j / sample_rate_hz)


def render_russian(rp: RussianParams, duration_s: float, sample_rate_hz: int) -> SampleBuffer:
    """Render burst-modulated carrier ("Russian current") for the given duration.

    Burst onsets follow the same drift-free accumulator as pulse trains, at the
    burst rate ``1000 / (burst_ms + interburst_ms)`` Hz; the burst length is
    fixed at ``round(burst_ms * rate)`` samples and the gaps are exact zeros.
    Only complete bursts are emitted.
    """
    if duration_s < 0:
        raise ParameterError(f"duration_s must be >= 0, got {duration_s}")
    total = round_count(duration_s * sample_rate_hz)
    burst = russian_burst(rp, sample_rate_hz)
    out = np.zeros(total)
    if rp.interburst_ms == 0:
        # Degenerate 100% duty: a continuous carrier, phase reset each burst length.
        for onset in range(0, total, len(burst)):
            seg = burst[: total - onset]
            out[onset : onset + len(seg)] = seg
    else:
        for onset in train_onsets(rp.burst_rate_hz, sample_rate_hz, total, len(burst)):
            out[onset : onset + len(burst)] = burst
    return SampleBuffer(sample_rate_hz, out)


def render_arbitrary(
    table,
    frequency_hz: float,
    duration_s: float,
    sample_rate_hz: int,
    amplitude: float = 1.0,
    gain_db: float = 0.0,
    interpolation: str = "hold",
) -> SampleBuffer:
    """Render a normalized single-period table as a periodic waveform.

    One traversal of the table spans one period (cycle boundaries follow the
    drift-free accumulator). ``hold`` keeps each entry flat over its slice of
    the period, preserving sharp edges; ``linear`` interpolates between entries
    with wraparound.
    """
    spec = WaveformSpec(Shape.ARBITRARY, table=tuple(table))
    if duration_s < 0:
        raise ParameterError(f"duration_s must be >= 0, got {duration_s}")
    if not (frequency_hz > 0 and np.isfinite(frequency_hz)):
        raise ParameterError(f"frequency_hz must be > 0, got {frequency_hz}")
    if interpolation not in ("hold", "linear"):
        raise ParameterError(f"interpolation must be 'hold' or 'linear', got {interpolation!r}")
    scale = effective_scale(amplitude, gain_db)
    tbl = np.asarray(spec.table, dtype=np.float64)
    m = len(tbl)
    total = round_count(duration_s * sample_rate_hz)
    out = np.zeros(total)
    k = 0
    while True:
        start = round_count(k * sample_rate_hz / frequency_hz)
        if start >= total:
            break
        end = round_count((k + 1) * sample_rate_hz / frequency_hz)
        span = end - start
        if span <= 0:
            raise ParameterError(
                f"frequency {frequency_hz:g} Hz leaves no samples per period at {sample_rate_hz} Hz"
            )
        stop = min(end, total)
        u = np.arange(stop - start, dtype=np.float64) / span
        if interpolation == "hold":
            idx = np.minimum((u * m).astype(np.intp), m - 1)
            out[start:stop] = scale * tbl[idx]
        else:
            x = u * m
            j = np.floor(x).astype(np.intp)
            frac = x - j
            out[start:stop] = scale * ((1.0 - frac) * tbl[j % m] + frac * tbl[(j + 1) % m])
        k += 1
    return SampleBuffer(sample_rate_hz, out)
