"""Per-waveform level calibration: fixed gain offsets plus RMS equalization.

The default table compensates the intensity imbalance between shapes at a
fixed output level: square pulses land hotter and triangles weaker, so square
gets -2 dB, sine +2 dB, triangle +6 dB. Everything else passes through at
0 dB. For comparisons at matched intensity, prefer `normalize_rms`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .buffer import FULL_SCALE_TOLERANCE, SampleBuffer
from .errors import ClippingError, ParameterError
from .synth import Shape
from .units import db_to_linear

DEFAULT_GAINS_DB = {
    Shape.SQUARE: -2.0,
    Shape.SINE: +2.0,
    Shape.TRIANGLE: +6.0,
    Shape.SAW: 0.0,
    Shape.RUSSIAN: 0.0,
    Shape.ARBITRARY: 0.0,
}


@dataclass
class GainTable:
    """Per-shape gain offsets in dB."""

    entries: dict = field(default_factory=lambda: dict(DEFAULT_GAINS_DB))

    def gain_db(self, shape: Shape) -> float:
        return self.entries.get(Shape(shape), 0.0)

    def to_dict(self) -> dict:
        return {shape.value: db for shape, db in self.entries.items()}

    @classmethod
    def from_dict(cls, mapping: dict) -> "GainTable":
        entries = dict(DEFAULT_GAINS_DB)
        for key, db in mapping.items():
            entries[Shape(key)] = float(db)
        return cls(entries)


def default_gain_db(shape: Shape) -> float:
    """The stock calibration offset for a shape (square -2, sine +2, triangle +6)."""
    return DEFAULT_GAINS_DB[Shape(shape)]


def apply_gain(buffer: SampleBuffer, gain_db: float) -> SampleBuffer:
    """Scale every sample by 10^(gain_db/20); a resulting peak above full scale errors."""
    factor = db_to_linear(gain_db)
    scaled = buffer.samples * factor
    if scaled.size:
        peak = float(np.max(np.abs(scaled)))
        if peak > 1.0 + FULL_SCALE_TOLERANCE:
            raise ClippingError(
                f"gain {gain_db:+g} dB would clip: peak {peak:.6g} > full scale"
            )
    return SampleBuffer(buffer.sample_rate_hz, scaled)


def signal_rms(buffer: SampleBuffer) -> float:
    """RMS over the nonzero-signal support (inter-pulse zeros excluded).

    Whole-buffer RMS varies with pulse rate, which conflates level with
    frequency; support RMS measures the pulses themselves.
    """
    active = buffer.samples[buffer.samples != 0.0]
    if active.size == 0:
        raise ParameterError("buffer has no nonzero samples; RMS scale undefined")
    return float(np.sqrt(np.mean(np.square(active))))


def normalize_rms(buffer: SampleBuffer, target_rms: float) -> SampleBuffer:
    """Rescale so the support RMS equals target_rms; errors if that would clip."""
    if not (target_rms > 0 and np.isfinite(target_rms)):
        raise ParameterError(f"target_rms must be > 0, got {target_rms}")
    current = signal_rms(buffer)
    factor = target_rms / current
    peak = float(np.max(np.abs(buffer.samples))) * factor
    if peak > 1.0 + FULL_SCALE_TOLERANCE:
        raise ClippingError(
            f"normalizing RMS {current:.6g} -> {target_rms:.6g} needs peak {peak:.6g} > full scale"
        )
    return SampleBuffer(buffer.sample_rate_hz, buffer.samples * factor)
