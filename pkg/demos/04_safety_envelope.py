"""
Safety envelope
===============

Every parameter set passes through validation before it is rendered or
applied live. The default envelope hard-rejects frequencies outside
1-500 Hz and pulse widths outside 30-800 us, and warns above the typical
1-150 Hz range. Clamping is the opt-in alternative to rejection: it pulls
each offending value to the nearest hard bound and leaves everything else
alone.
"""

import stimwave as sw

square = sw.WaveformSpec(sw.Shape.SQUARE, sw.Polarity.BIPHASIC)

cases = [
    ("comfortable", sw.PulseTrainParams(100.0, 200.0, amplitude=0.5)),
    ("high but legal", sw.PulseTrainParams(160.0, 120.0, amplitude=0.5)),
    ("width too large", sw.PulseTrainParams(100.0, 900.0, amplitude=0.5)),
    ("frequency way out", sw.PulseTrainParams(1000.0, 120.0, amplitude=0.5)),
]

for label, params in cases:
    report = sw.validate(square, params)
    print(f"--- {label}")
    print(report.summary())
    print()

# Clamp pulls rejected values to the nearest bound; already-legal parameters
# come back untouched (same object, no silent drift).
wild = sw.PulseTrainParams(1000.0, 900.0, amplitude=0.5)
tamed = sw.clamp(square, wild)
print(f"clamp: {wild.frequency_hz:.0f} Hz / {wild.pulse_width_us:.0f} us"
      f"  ->  {tamed.frequency_hz:.0f} Hz / {tamed.pulse_width_us:.0f} us")
print(f"re-validate after clamp: {sw.validate(square, tamed).verdict.value}")
print()

# Russian current is validated on its burst rate, not the 2.5 kHz carrier:
# the carrier is definitional, the burst rate is the stimulation rate.
russian = sw.WaveformSpec(sw.Shape.RUSSIAN, sw.Polarity.BIPHASIC)
print("russian defaults:",
      sw.validate(russian, sw.RussianParams()).verdict.value)
print("russian 2 ms / 2 ms (250 Hz bursts):",
      sw.validate(russian, sw.RussianParams(burst_ms=2.0, interburst_ms=2.0)).verdict.value)
print()

# Envelopes are replaceable -- but only deliberately, never from a UI slider.
wide = sw.SafetyEnvelope(width_hard=(30.0, 5000.0))
long_pulse = sw.PulseTrainParams(50.0, 2000.0, amplitude=0.4)
print(f"2000 us under the default envelope: "
      f"{sw.validate(square, long_pulse).verdict.value}")
print(f"2000 us under a widened envelope:   "
      f"{sw.validate(square, long_pulse, wide).verdict.value}")
