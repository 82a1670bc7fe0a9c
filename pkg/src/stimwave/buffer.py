"""Mono sample buffers: the unit of exchange between synthesis, analysis, and I/O."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

# Peaks may exceed full scale by at most this much before an operation is
# considered clipping; overshoot below it is float rounding noise and is
# snapped back to +/-1.
FULL_SCALE_TOLERANCE = 1e-9


def _coerce_samples(samples) -> np.ndarray:
    arr = np.asarray(samples, dtype=np.float64)
    if arr.ndim != 1:
        raise ParameterError(f"samples must be one-dimensional (mono), got shape {arr.shape}")
    return arr


@dataclass(eq=False)
class SampleBuffer:
    """A mono sequence of amplitude samples in [-1, +1] at a declared sample rate.

    Out-of-range content is rejected at construction; synthesis is expected to
    stay in range by design, never by clipping after the fact.
    """

    sample_rate_hz: int
    samples: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        if int(self.sample_rate_hz) != self.sample_rate_hz or self.sample_rate_hz <= 0:
            raise ParameterError(f"sample_rate_hz must be a positive integer, got {self.sample_rate_hz!r}")
        self.sample_rate_hz = int(self.sample_rate_hz)
        arr = _coerce_samples(self.samples)
        if arr.size:
            if not np.all(np.isfinite(arr)):
                raise ParameterError("samples must be finite")
            peak = float(np.max(np.abs(arr)))
            if peak > 1.0 + FULL_SCALE_TOLERANCE:
                raise ParameterError(f"samples exceed full scale (peak {peak:.9g} > 1)")
            if peak > 1.0:
                # Rounding overshoot within tolerance: snap to exactly +/-1.
                arr = np.clip(arr, -1.0, 1.0)
        self.samples = arr

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz

    def same_signal(self, other: "SampleBuffer") -> bool:
        """Bit-exact equality of rate and samples."""
        return (
            self.sample_rate_hz == other.sample_rate_hz
            and len(self.samples) == len(other.samples)
            and bool(np.array_equal(self.samples, other.samples))
        )
