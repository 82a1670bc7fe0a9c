"""Envelope validation, clamping, and their soundness properties."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stimwave.errors import ParameterError
from stimwave.safety import (
    DEFAULT_ENVELOPE,
    SafetyEnvelope,
    Severity,
    Verdict,
    clamp,
    validate,
)
from stimwave.synth import Polarity, PulseTrainParams, RussianParams, Shape, WaveformSpec

SQUARE = WaveformSpec(Shape.SQUARE, Polarity.BIPHASIC)
RUSSIAN = WaveformSpec(Shape.RUSSIAN)


def test_default_envelope_values():
    env = DEFAULT_ENVELOPE
    assert env.freq_hard == (1.0, 500.0)
    assert env.freq_typical == (1.0, 150.0)
    assert env.width_hard == (30.0, 800.0)
    assert env.max_continuous_s == 300.0
    assert env.russian_burst_rate_hard == (1.0, 150.0)


def test_envelope_sanity_checks():
    with pytest.raises(ParameterError):
        SafetyEnvelope(freq_typical=(1.0, 600.0))  # typical wider than hard
    with pytest.raises(ParameterError):
        SafetyEnvelope(width_hard=(0.0, 800.0))


def test_above_typical_warns():
    report = validate(SQUARE, PulseTrainParams(160, 120))
    assert report.verdict is Verdict.PASS_WITH_WARNINGS
    assert any(f.parameter == "frequency_hz" and f.severity is Severity.WARNING
               for f in report.findings)


def test_wide_pulse_rejected():
    report = validate(SQUARE, PulseTrainParams(100, 900))
    assert report.verdict is Verdict.REJECT
    assert any(f.parameter == "pulse_width_us" and f.severity is Severity.HARD
               for f in report.findings)


def test_high_frequency_rejected():
    report = validate(SQUARE, PulseTrainParams(1000, 120))
    assert report.verdict is Verdict.REJECT


def test_russian_defaults_pass():
    report = validate(RUSSIAN, RussianParams())
    assert report.verdict is Verdict.PASS


def test_russian_carrier_exempt_burst_rate_checked():
    # 2.5 kHz carrier never trips the frequency bound; a 500 Hz burst rate does.
    fast = RussianParams(burst_ms=1.0, interburst_ms=1.0)
    report = validate(RUSSIAN, fast)
    assert report.verdict is Verdict.REJECT
    assert report.findings[0].parameter == "burst_rate_hz"


def test_long_duration_warns_not_rejects():
    report = validate(SQUARE, PulseTrainParams(100, 200), duration_s=3600)
    assert report.verdict is Verdict.PASS_WITH_WARNINGS
    assert report.findings[0].parameter == "duration_s"


def test_clamp_moves_to_nearest_bound():
    clamped = clamp(SQUARE, PulseTrainParams(1000, 120))
    assert clamped.frequency_hz == 500.0
    clamped = clamp(SQUARE, PulseTrainParams(100, 10))
    assert clamped.pulse_width_us == 30.0


def test_clamp_identity_on_valid_params():
    params = PulseTrainParams(100, 200, 0.7, -2.0)
    assert clamp(SQUARE, params) is params


def test_clamp_russian_preserves_duty():
    fast = RussianParams(burst_ms=1.0, interburst_ms=3.0)  # 250 Hz burst rate
    clamped = clamp(RUSSIAN, fast)
    assert clamped.burst_rate_hz == pytest.approx(150.0)
    assert clamped.duty == pytest.approx(0.25)


# --- properties -------------------------------------------------------------

any_params = st.one_of(
    st.builds(
        PulseTrainParams,
        frequency_hz=st.floats(min_value=0.01, max_value=5000.0),
        pulse_width_us=st.floats(min_value=1.0, max_value=5000.0),
    ),
    st.builds(
        RussianParams,
        burst_ms=st.floats(min_value=0.2, max_value=400.0),
        interburst_ms=st.floats(min_value=0.0, max_value=400.0),
    ),
)


@settings(max_examples=200, deadline=None)
@given(any_params)
def test_clamp_is_sound_and_idempotent(params):
    spec = RUSSIAN if isinstance(params, RussianParams) else SQUARE
    once = clamp(spec, params)
    assert validate(spec, once).verdict is not Verdict.REJECT
    twice = clamp(spec, once)
    assert twice == once


@settings(max_examples=100, deadline=None)
@given(
    any_params,
    st.floats(min_value=0.0, max_value=0.4),
    st.floats(min_value=0.0, max_value=0.4),
)
def test_tightening_never_unrejects(params, lo_shrink, hi_shrink):
    spec = RUSSIAN if isinstance(params, RussianParams) else SQUARE
    base = DEFAULT_ENVELOPE

    def shrink(interval):
        lo, hi = interval
        span = hi - lo
        new = (lo + lo_shrink * span / 2, hi - hi_shrink * span / 2)
        return new if new[0] < new[1] else interval

    tight = SafetyEnvelope(
        freq_hard=shrink(base.freq_hard),
        freq_typical=(
            max(base.freq_typical[0], shrink(base.freq_hard)[0]),
            min(base.freq_typical[1], shrink(base.freq_hard)[1]),
        ),
        width_hard=shrink(base.width_hard),
        max_continuous_s=base.max_continuous_s,
        russian_burst_rate_hard=shrink(base.russian_burst_rate_hard),
    )
    if validate(spec, params, base).verdict is Verdict.REJECT:
        assert validate(spec, params, tight).verdict is Verdict.REJECT
