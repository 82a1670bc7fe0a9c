"""Parameter recovery from rendered signals: a software oscilloscope.

Given a sample buffer, report what a bench measurement would show: pulse
count, estimated frequency, per-phase pulse width in samples, DC offset,
RMS, peak, and the dominant spectral line.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .buffer import SampleBuffer
from .errors import ParameterError

# A pulse onset is a rising crossing of half the observed peak.
ONSET_THRESHOLD_RATIO = 0.5
# Samples whose level stays below this fraction of the peak are treated as
# silence between pulses. Kept an order of magnitude under the 1%-of-peak
# noise floor so the shallow first samples of a saw ramp still count toward
# the measured width.
SUPPORT_FLOOR_RATIO = 1e-3


@dataclass(frozen=True)
class AnalysisReport:
    """Measurements taken from one buffer.

    Detection fields are None when the buffer contains no pulses (an
    all-zero buffer, or fewer than two onsets for the frequency estimate).
    """

    pulse_count: int
    detected_frequency_hz: Optional[float]
    detected_pulse_width_samples: Optional[int]
    dc_offset: float
    rms: float
    peak: float
    dominant_spectral_hz: Optional[float]

    def to_dict(self) -> dict:
        return {
            "pulse_count": self.pulse_count,
            "detected_frequency_hz": self.detected_frequency_hz,
            "detected_pulse_width_samples": self.detected_pulse_width_samples,
            "dc_offset": self.dc_offset,
            "rms": self.rms,
            "peak": self.peak,
            "dominant_spectral_hz": self.dominant_spectral_hz,
        }


def _onset_indices(samples: np.ndarray, threshold: float) -> np.ndarray:
    """Indices where the signal rises to or above the threshold."""
    above = samples >= threshold
    edges = np.flatnonzero(above[1:] & ~above[:-1]) + 1
    if above[0]:
        edges = np.concatenate(([0], edges))
    return edges


def _support_runs(samples: np.ndarray, floor: float):
    """Start/end pairs of maximal runs with signal above the floor."""
    padded = np.concatenate(([False], samples > floor, [False]))
    flips = np.flatnonzero(np.diff(padded.astype(np.int8)))
    return flips[::2], flips[1::2]


def _dominant_hz(samples: np.ndarray, rate: int) -> Optional[float]:
    if len(samples) < 2:
        return None
    power = np.abs(np.fft.rfft(samples)) ** 2
    power[0] = 0.0  # DC is reported separately
    if not np.any(power > 0.0):
        return None
    return float(np.argmax(power)) * rate / len(samples)


def analyze(buffer: SampleBuffer) -> AnalysisReport:
    """Measure a buffer and return an AnalysisReport.

    Pulse onsets are rising crossings of 50% of the observed peak; the
    frequency estimate is (onsets - 1) / (time span of onsets); the width is
    the mode of the lengths of the above-floor runs containing each onset,
    which for the built-in shapes lands within one sample of the rendered
    phase length. The dominant spectral line is the strongest non-DC bin of
    the power spectrum. An all-zero buffer yields pulse_count 0 and None for
    every detection field; an empty buffer is an error.
    """
    s = buffer.samples
    if len(s) == 0:
        raise ParameterError("cannot analyze an empty buffer")

    peak = float(np.max(np.abs(s)))
    dc = float(np.mean(s))
    rms = float(np.sqrt(np.mean(np.square(s))))
    if peak == 0.0:
        return AnalysisReport(0, None, None, dc, rms, peak, None)

    onsets = _onset_indices(s, ONSET_THRESHOLD_RATIO * peak)
    pulse_count = int(onsets.size)

    frequency = None
    if pulse_count >= 2:
        span_s = (onsets[-1] - onsets[0]) / buffer.sample_rate_hz
        frequency = (pulse_count - 1) / span_s

    width = None
    if pulse_count >= 1:
        starts, ends = _support_runs(s, SUPPORT_FLOOR_RATIO * peak)
        lengths = []
        for onset in onsets:
            i = int(np.searchsorted(starts, onset, side="right")) - 1
            if i >= 0 and ends[i] > onset:
                lengths.append(int(ends[i] - starts[i]))
        if lengths:
            width = Counter(lengths).most_common(1)[0][0]

    return AnalysisReport(
        pulse_count=pulse_count,
        detected_frequency_hz=frequency,
        detected_pulse_width_samples=width,
        dc_offset=dc,
        rms=rms,
        peak=peak,
        dominant_spectral_hz=_dominant_hz(s, buffer.sample_rate_hz),
    )
