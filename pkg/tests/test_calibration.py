"""Gain table defaults, dB application, and RMS normalization."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stimwave.buffer import SampleBuffer
from stimwave.calibration import (
    GainTable,
    apply_gain,
    default_gain_db,
    normalize_rms,
    signal_rms,
)
from stimwave.errors import ClippingError, ParameterError
from stimwave.synth import PulseTrainParams, Shape, WaveformSpec, render_train


def test_default_gain_values():
    assert default_gain_db(Shape.SQUARE) == -2.0
    assert default_gain_db(Shape.SINE) == +2.0
    assert default_gain_db(Shape.TRIANGLE) == +6.0
    assert default_gain_db(Shape.RUSSIAN) == 0.0
    assert default_gain_db(Shape.SAW) == 0.0


def test_gain_table_round_trip():
    table = GainTable()
    assert GainTable.from_dict(table.to_dict()) == table
    custom = GainTable.from_dict({"square": -3.5})
    assert custom.gain_db(Shape.SQUARE) == -3.5
    assert custom.gain_db(Shape.SINE) == +2.0  # untouched defaults stay


def test_zero_gain_is_identity():
    buf = SampleBuffer(48_000, np.linspace(-1, 1, 101))
    out = apply_gain(buf, 0.0)
    assert out.same_signal(buf)


def test_half_scale_gain():
    buf = SampleBuffer(48_000, np.array([1.0, -1.0, 0.25]))
    out = apply_gain(buf, -6.0206)
    # -6.0206 dB is 20*log10(2) rounded to 4 decimals, so the linear
    # factor lands within 5.1e-9 of one half, not exactly on it.
    assert out.samples[0] == pytest.approx(0.5, abs=1e-8)
    assert out.samples[0] == pytest.approx(10.0 ** (-6.0206 / 20.0), abs=1e-15)


def test_gain_clipping_rejected():
    buf = SampleBuffer(48_000, np.array([0.6]))
    with pytest.raises(ClippingError):
        apply_gain(buf, +6.0)  # 0.6 * 1.9953 > 1


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=-24.0, max_value=-0.1))
def test_gain_inverse_round_trip(gain):
    buf = SampleBuffer(48_000, np.sin(np.linspace(0, 7, 500)))
    back = apply_gain(apply_gain(buf, gain), -gain)
    np.testing.assert_allclose(back.samples, buf.samples, atol=1e-12)


def test_signal_rms_ignores_inter_pulse_zeros():
    buf = render_train(WaveformSpec(Shape.SQUARE), PulseTrainParams(50, 200, 0.5), 1.0, 192_000)
    # constant 0.5 pulses: support RMS is the pulse level itself
    assert signal_rms(buf) == pytest.approx(0.5, abs=1e-12)


def test_normalize_rms_hits_target():
    buf = render_train(WaveformSpec(Shape.SINE), PulseTrainParams(100, 300, 0.8), 0.5, 192_000)
    out = normalize_rms(buf, 0.25)
    assert signal_rms(out) == pytest.approx(0.25, abs=1e-6)


def test_normalize_rms_fixed_point_and_idempotence():
    buf = render_train(WaveformSpec(Shape.SQUARE), PulseTrainParams(100, 300, 0.4), 0.5, 192_000)
    target = signal_rms(buf)
    once = normalize_rms(buf, target)
    np.testing.assert_allclose(once.samples, buf.samples, atol=1e-9)
    twice = normalize_rms(once, target)
    np.testing.assert_allclose(twice.samples, once.samples, atol=1e-9)


def test_normalize_rms_errors():
    silent = SampleBuffer(48_000, np.zeros(100))
    with pytest.raises(ParameterError):
        normalize_rms(silent, 0.5)
    loud = render_train(WaveformSpec(Shape.SQUARE), PulseTrainParams(100, 300, 0.9), 0.5, 192_000)
    with pytest.raises(ClippingError):
        normalize_rms(loud, 2.0)
