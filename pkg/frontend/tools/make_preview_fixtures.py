#!/usr/bin/env python3
"""Regenerate test/fixtures/preview_fixtures.json.

Each case holds wire-shaped spec/params, a rate and duration, and the exact
samples the reference renderer produces. The preview tests replay the same
inputs through the TypeScript mirror and compare sample by sample, which
pins the client-side shaping rules to the real output stage.

Run from the frontend directory:  python3 tools/make_preview_fixtures.py
"""

import json
import pathlib

import stimwave as sw

OUT = pathlib.Path(__file__).resolve().parent.parent / "test" / "fixtures" / "preview_fixtures.json"


def pulse_case(name, shape, polarity, freq, width, amplitude, gain=0.0, gap=0.0,
               rate=48_000, periods=2.0):
    spec = sw.WaveformSpec(sw.Shape(shape), sw.Polarity(polarity), interphase_gap_us=gap)
    params = sw.PulseTrainParams(freq, width, amplitude=amplitude, gain_db=gain)
    duration = periods / freq
    buf = sw.render_train(spec, params, duration, rate)
    spec_wire = {"shape": shape, "polarity": polarity}
    if gap:
        spec_wire["interphase_gap_us"] = gap
    return {
        "name": name,
        "spec": spec_wire,
        "params": {"frequency_hz": freq, "pulse_width_us": width,
                   "amplitude": amplitude, "gain_db": gain},
        "sample_rate_hz": rate,
        "duration_s": duration,
        "samples": buf.samples.tolist(),
    }


def russian_case(name, carrier, burst_ms, interburst_ms, amplitude, gain=0.0,
                 rate=48_000, periods=2.0):
    params = sw.RussianParams(carrier_hz=carrier, burst_ms=burst_ms,
                              interburst_ms=interburst_ms, amplitude=amplitude,
                              gain_db=gain)
    duration = periods * (burst_ms + interburst_ms) / 1000.0
    buf = sw.render_russian(params, duration, rate)
    return {
        "name": name,
        "spec": {"shape": "russian"},
        "params": {"carrier_hz": carrier, "burst_ms": burst_ms,
                   "interburst_ms": interburst_ms, "amplitude": amplitude,
                   "gain_db": gain},
        "sample_rate_hz": rate,
        "duration_s": duration,
        "samples": buf.samples.tolist(),
    }


cases = [
    # The four pulse shapes, biphasic, at the canonical panel settings.
    pulse_case("sine-biphasic-160-120", "sine", "biphasic", 160.0, 120.0, 0.8),
    pulse_case("triangle-biphasic-160-120", "triangle", "biphasic", 160.0, 120.0, 0.8),
    pulse_case("saw-biphasic-160-120", "saw", "biphasic", 160.0, 120.0, 0.8),
    pulse_case("square-biphasic-160-120", "square", "biphasic", 160.0, 120.0, 0.8),
    # Monophasic, non-zero gain, and an interphase gap.
    pulse_case("square-monophasic-gain", "square", "monophasic", 100.0, 200.0, 0.5, gain=-2.0),
    pulse_case("sine-biphasic-gap", "sine", "biphasic", 80.0, 300.0, 0.7, gap=100.0),
    pulse_case("triangle-monophasic-gain+6", "triangle", "monophasic", 50.0, 400.0, 0.4, gain=6.0),
    # Width that lands on a .5 sample count (rounding half-up) and a 1-sample phase.
    pulse_case("square-halfup-width", "square", "biphasic", 100.0, 218.75, 0.6, rate=48_000),
    pulse_case("sine-one-sample-phase", "sine", "biphasic", 400.0, 10.0, 0.9),
    # High rate, the acceptance settings.
    pulse_case("square-192k", "square", "biphasic", 160.0, 120.0, 0.8, rate=192_000),
    # Russian current: canonical, a non-integer cycle count, and 100% duty.
    russian_case("russian-canonical", 2500.0, 10.0, 10.0, 0.7),
    russian_case("russian-fast-bursts", 2500.0, 3.125, 3.125, 0.8),
    russian_case("russian-full-duty", 2000.0, 5.0, 0.0, 0.5),
    russian_case("russian-gain", 4000.0, 8.0, 12.0, 0.5, gain=2.0),
]

OUT.parent.mkdir(parents=True, exist_ok=True)
with OUT.open("w") as fh:
    json.dump({"cases": cases}, fh)
print(f"wrote {OUT} ({OUT.stat().st_size} bytes, {len(cases)} cases)")
