"""
Russian current anatomy
=======================

Russian current is a 2.5 kHz sine carrier gated into 10 ms bursts with 10 ms
rests, giving a 50 Hz burst rate at 50% duty. At 48 kHz that is 480 samples
on, 480 samples off, and exactly 25 carrier cycles per burst. This script
renders one second and verifies each piece of that anatomy directly.
"""

import os

import numpy as np

import stimwave as sw

RATE = 48_000
OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

buf = sw.render_russian(sw.RussianParams(amplitude=0.8), duration_s=1.0,
                        sample_rate_hz=RATE)
samples = buf.samples
period = 960  # 480 on + 480 off

print(f"samples rendered: {samples.size}")
print(f"bursts:           {samples.size // period}")

# every rest half must be exactly silent, every carrier half live
silent_rests = sum(
    bool(np.all(samples[p * period + 480:(p + 1) * period] == 0.0))
    for p in range(50))
print(f"silent rest halves: {silent_rests} / 50")

# 25 cycles cross zero 50 times per burst (each burst opens on an exact zero)
burst = samples[:480]
flips = int(np.sum(burst[:-1] * burst[1:] < 0.0)) + int(np.sum(burst == 0.0))
print(f"zero crossings in the first burst: {flips}  (25 cycles x 2)")

report = sw.analyze(buf)
print(f"dominant spectral component: {report.dominant_spectral_hz:.0f} Hz")
print(f"mean level (charge): {report.dc_offset:+.2e}")

path = os.path.join(OUT, "russian_50hz.wav")
sw.write_wav(path, buf, sw.WavFormat(RATE, sw.Encoding.FLOAT32))
print(f"wrote {path}")

# The burst rate is adjustable. Faster burst rates shorten both halves;
# the carrier stays at 2.5 kHz.
fast = sw.render_russian(sw.RussianParams(burst_ms=5.0, interburst_ms=5.0,
                                          amplitude=0.8), 1.0, RATE)
print(f"\n5 ms / 5 ms variant: {sw.analyze(fast).dominant_spectral_hz:.0f} Hz "
      f"carrier, {fast.samples.size // 480} bursts per second")
