"""
Waveform gallery
================

Render every pulse shape at the same settings, write each to a WAV file,
then run the analyzer over the files to confirm the settings survive the
round trip. 160 Hz / 120 us is a realistic sensory-level configuration;
at 192 kHz each 120 us phase spans 23 samples.
"""

import os

import numpy as np

import stimwave as sw

RATE = 192_000
OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

params = sw.PulseTrainParams(frequency_hz=160.0, pulse_width_us=120.0,
                             amplitude=0.5)

print(f"{'waveform':<22}{'pulses':>8}{'freq Hz':>10}{'width':>7}"
      f"{'DC offset':>12}{'RMS':>9}")

for shape in (sw.Shape.SINE, sw.Shape.TRIANGLE, sw.Shape.SAW, sw.Shape.SQUARE):
    for polarity in (sw.Polarity.MONOPHASIC, sw.Polarity.BIPHASIC):
        spec = sw.WaveformSpec(shape, polarity)
        buf = sw.render_train(spec, params, duration_s=1.0, sample_rate_hz=RATE)

        name = f"{shape.value}_{polarity.value}"
        path = os.path.join(OUT, f"{name}.wav")
        sw.write_wav(path, buf, sw.WavFormat(RATE, sw.Encoding.FLOAT32))

        report = sw.analyze(buf)
        print(f"{name:<22}{report.pulse_count:>8}"
              f"{report.detected_frequency_hz:>10.1f}"
              f"{report.detected_pulse_width_samples:>7}"
              f"{report.dc_offset:>12.2e}{report.rms:>9.4f}")

# Charge balance: biphasic pulses negate their leading phase exactly, so the
# rendered train carries no net charge. Monophasic trains do, which is why
# long monophasic stimulation is avoided in practice.
square_bi = sw.render_train(sw.WaveformSpec(sw.Shape.SQUARE, sw.Polarity.BIPHASIC),
                            params, 1.0, RATE)
square_mono = sw.render_train(sw.WaveformSpec(sw.Shape.SQUARE, sw.Polarity.MONOPHASIC),
                              params, 1.0, RATE)
print()
print(f"biphasic square net charge:   {np.sum(square_bi.samples):+.2e}")
print(f"monophasic square net charge: {np.sum(square_mono.samples):+.2e}")
print()
print(f"WAV files in {OUT}")
