"""
Program files
=============

A program file sequences stimulation segments declaratively: shape and
parameters per segment, a duration, and optional amplitude ramps. Programs
are validated against the safety envelope when loaded -- a file that asks
for something outside the envelope refuses to load, with the report
explaining which field broke which bound.
"""

import os

import numpy as np

import stimwave as sw

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

PROGRAM = """\
version: 1
segments:
  # warm-up: low rate, ramped in so the first pulses are gentle
  - shape: sine
    polarity: biphasic
    frequency_hz: 50.0
    pulse_width_us: 300.0
    amplitude: 0.4
    duration_s: 2.0
    ramp_in_s: 1.0
  # work phase: square pulses with the calibration offset applied
  - shape: square
    polarity: biphasic
    frequency_hz: 100.0
    pulse_width_us: 200.0
    amplitude: 0.5
    gain_db: -2.0
    duration_s: 3.0
  # russian current block, ramped out at the end
  - shape: russian
    amplitude: 0.45
    duration_s: 2.0
    ramp_out_s: 0.5
"""

program = sw.parse_program(PROGRAM)
print(f"loaded {len(program.segments)} segments, "
      f"{program.total_duration_s:.1f} s total")
for i, report in enumerate(program.validation):
    print(f"  segment {i + 1}: {report.verdict.value}")

RATE = 48_000
buf = sw.render_program(program, RATE)
path = os.path.join(OUT, "session.wav")
sw.write_wav(path, buf, sw.WavFormat(RATE, sw.Encoding.FLOAT32))
print(f"rendered {buf.samples.size} samples -> {path}")

# The ramp scales whole pulses, so each pulse keeps its shape and the train
# keeps charge balance; only the height climbs.
first_second = buf.samples[:RATE]
peaks = []
level = 0.0
for x in np.abs(first_second):
    if x > level:
        level = x
        peaks.append(level)
print(f"peak level climbs through the ramp: "
      f"{peaks[0]:.3f} ... {peaks[len(peaks)//2]:.3f} ... {peaks[-1]:.3f}")
print(f"net charge over the whole program: {np.sum(buf.samples):+.2e}")
print()

# A program asking for 900 us pulses does not load.
bad = PROGRAM.replace("pulse_width_us: 200.0", "pulse_width_us: 900.0")
try:
    sw.parse_program(bad)
except sw.ProgramError as exc:
    print(f"rejected program: {exc}")

# Parse errors point at the field and line.
try:
    sw.parse_program("version: 1\nsegments:\n  - shape: hexagon\n")
except sw.ProgramError as exc:
    print(f"\nparse error: {exc}")
