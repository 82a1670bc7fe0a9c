"""
Gain calibration
================

At the same peak amplitude, different pulse shapes carry different energy:
a square phase holds its peak for the whole width, a half-sine averages
1/sqrt(2) of it, a triangle 1/sqrt(3). Subjectively that reads as square
feeling strongest and triangle weakest at equal settings.

The gain table compensates with fixed per-shape offsets (square -2 dB,
sine +2 dB, triangle +6 dB). normalize_rms offers the measured alternative:
scale each buffer to a common RMS target.
"""

import numpy as np

import stimwave as sw

params = sw.PulseTrainParams(frequency_hz=100.0, pulse_width_us=500.0,
                             amplitude=0.5)

print("single-phase RMS at equal peak 0.5:")
for shape in (sw.Shape.SQUARE, sw.Shape.SINE, sw.Shape.TRIANGLE):
    spec = sw.WaveformSpec(shape, sw.Polarity.MONOPHASIC)
    phase = sw.synth_pulse(spec, params, 192_000).samples
    rms = float(np.sqrt(np.mean(phase ** 2)))
    print(f"  {shape.value:<9} {rms:.4f}   (gain offset {sw.default_gain_db(shape):+.0f} dB)")

print()

# Applying the table: gain_db rides along in the params and scales the render.
# The -2/+2/+6 offsets pull the three shapes toward similar delivered energy.
print("train RMS after the table's gain offsets:")
for shape in (sw.Shape.SQUARE, sw.Shape.SINE, sw.Shape.TRIANGLE):
    spec = sw.WaveformSpec(shape, sw.Polarity.BIPHASIC)
    p = sw.PulseTrainParams(100.0, 500.0, amplitude=0.35,
                            gain_db=sw.default_gain_db(shape))
    buf = sw.render_train(spec, p, 1.0, 192_000)
    print(f"  {shape.value:<9} {sw.signal_rms(buf):.4f}")

print()

# Gain is never allowed to clip: pushing a 0.8 peak up by 6 dB would exceed
# full scale, and the library refuses rather than distorting the pulse shape.
loud = sw.render_train(sw.WaveformSpec(sw.Shape.SQUARE, sw.Polarity.BIPHASIC),
                       sw.PulseTrainParams(100.0, 500.0, amplitude=0.8),
                       1.0, 192_000)
try:
    sw.apply_gain(loud, 6.0)
except sw.ClippingError as exc:
    print(f"apply_gain(+6 dB on peak 0.8) refused: {exc}")

# normalize_rms: measure, then scale to a target
quiet = sw.render_train(sw.WaveformSpec(sw.Shape.TRIANGLE, sw.Polarity.BIPHASIC),
                        sw.PulseTrainParams(100.0, 500.0, amplitude=0.2),
                        1.0, 192_000)
matched = sw.normalize_rms(quiet, target_rms=0.05)
print(f"normalize_rms: {sw.signal_rms(quiet):.4f} -> {sw.signal_rms(matched):.4f}")
