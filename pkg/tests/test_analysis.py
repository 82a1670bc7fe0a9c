"""Analyzer behavior: parameter recovery, silence handling, spectral peak."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stimwave.analysis import AnalysisReport, analyze
from stimwave.buffer import SampleBuffer
from stimwave.errors import ParameterError
from stimwave.synth import (
    Polarity,
    PulseTrainParams,
    RussianParams,
    Shape,
    WaveformSpec,
    phase_sample_count,
    render_russian,
    render_train,
)
from stimwave.wavio import Encoding, WavFormat, decode_wav, encode_wav


def test_empty_buffer_rejected():
    with pytest.raises(ParameterError):
        analyze(SampleBuffer(48_000))


def test_silence_has_no_detections():
    report = analyze(SampleBuffer(48_000, np.zeros(4800)))
    assert report.pulse_count == 0
    assert report.detected_frequency_hz is None
    assert report.detected_pulse_width_samples is None
    assert report.dominant_spectral_hz is None
    assert report.dc_offset == 0.0 and report.rms == 0.0 and report.peak == 0.0


def test_reference_biphasic_square_recovery():
    buf = render_train(WaveformSpec(Shape.SQUARE, Polarity.BIPHASIC),
                       PulseTrainParams(160.0, 120.0), 1.0, 192_000)
    report = analyze(buf)
    assert report.pulse_count == 160
    assert report.detected_frequency_hz == pytest.approx(160.0, rel=0.01)
    assert report.detected_pulse_width_samples == 23
    assert report.peak == 1.0


def test_recovery_survives_pcm16_round_trip():
    buf = render_train(WaveformSpec(Shape.SINE, Polarity.BIPHASIC),
                       PulseTrainParams(100.0, 200.0, 0.8), 0.5, 48_000)
    out = decode_wav(encode_wav(buf, WavFormat(48_000, Encoding.PCM16)))
    report = analyze(out)
    n = phase_sample_count(200.0, 48_000)
    assert report.pulse_count == 50
    assert report.detected_frequency_hz == pytest.approx(100.0, rel=0.01)
    assert abs(report.detected_pulse_width_samples - n) <= 1


def test_russian_dominant_line_is_the_carrier():
    buf = render_russian(RussianParams(), 0.5, 48_000)
    report = analyze(buf)
    bin_hz = 48_000 / len(buf)
    assert abs(report.dominant_spectral_hz - 2500.0) <= bin_hz


def test_basic_statistics():
    samples = np.array([0.5, -0.5, 0.5, -0.5])
    report = analyze(SampleBuffer(48_000, samples))
    assert report.dc_offset == 0.0
    assert report.rms == pytest.approx(0.5, abs=1e-15)
    assert report.peak == 0.5


def test_dc_offset_of_monophasic_train():
    # 160 pulses/s of 23-sample flat phases at 192 kHz occupy 23*160/192000
    # of the time at amplitude 1, which is the mean exactly
    buf = render_train(WaveformSpec(Shape.SQUARE, Polarity.MONOPHASIC),
                       PulseTrainParams(160.0, 120.0), 1.0, 192_000)
    assert analyze(buf).dc_offset == pytest.approx(23 * 160 / 192_000, rel=1e-12)


def test_single_pulse_has_no_frequency_estimate():
    buf = render_train(WaveformSpec(Shape.SQUARE, Polarity.BIPHASIC),
                       PulseTrainParams(5.0, 100.0), 0.15, 48_000)
    report = analyze(buf)
    assert report.pulse_count == 1
    assert report.detected_frequency_hz is None
    assert report.detected_pulse_width_samples == phase_sample_count(100.0, 48_000)


def test_sine_table_spectral_peak():
    k = np.arange(48_000)
    buf = SampleBuffer(48_000, 0.9 * np.sin(2 * np.pi * 440.0 * k / 48_000))
    assert analyze(buf).dominant_spectral_hz == pytest.approx(440.0, abs=1.0)


def test_report_dict_has_stable_keys():
    report = analyze(SampleBuffer(48_000, np.zeros(10)))
    assert list(report.to_dict()) == [
        "pulse_count", "detected_frequency_hz", "detected_pulse_width_samples",
        "dc_offset", "rms", "peak", "dominant_spectral_hz",
    ]
    assert isinstance(report, AnalysisReport)


@settings(max_examples=80, deadline=None)
@given(
    st.sampled_from([Shape.SQUARE, Shape.SINE, Shape.TRIANGLE, Shape.SAW]),
    st.sampled_from(list(Polarity)),
    st.floats(min_value=20.0, max_value=400.0),
    st.floats(min_value=40.0, max_value=600.0),
    st.floats(min_value=0.2, max_value=1.0),
    st.sampled_from([48_000, 192_000]),
)
def test_parameter_recovery_property(shape, polarity, f, w, amp, rate):
    """Frequency within 1% and width within 1 sample whenever >= 10 pulses."""
    duration = 12.0 / f  # at least 12 pulse periods
    buf = render_train(WaveformSpec(shape, polarity), PulseTrainParams(f, w, amp),
                       duration, rate)
    report = analyze(buf)
    assert report.pulse_count >= 10
    assert report.detected_frequency_hz == pytest.approx(f, rel=0.01)
    assert abs(report.detected_pulse_width_samples - phase_sample_count(w, rate)) <= 1
