"""
Strength-duration model
=======================

The threshold amplitude needed to activate a nerve falls as the pulse gets
wider, following the classical hyperbola

    threshold(t) = rheobase * (1 + chronaxie / t)

The rheobase is the asymptotic threshold for very wide pulses; the chronaxie
is the width where the threshold is exactly twice the rheobase. Narrow pulses
need disproportionately more amplitude, which is why pulse width is a real
dosing control and not a cosmetic one.
"""

import csv
import os

import numpy as np

import stimwave as sw

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

model = sw.SDModel(rheobase=5.0, chronaxie_us=200.0)

print(f"rheobase {model.rheobase}, chronaxie {model.chronaxie_us} us")
print(f"threshold at the chronaxie: {sw.threshold_amplitude(200.0, model):.1f}"
      f"  (exactly twice the rheobase)")
print(f"threshold at 1 s pulses:    {sw.threshold_amplitude(1e6, model):.3f}"
      f"  (approaching the rheobase)")
print()

durations = np.geomspace(20.0, 5000.0, 12)
thresholds = sw.sd_curve(model, durations)
print(f"{'width us':>10}{'threshold':>12}{'active at 12?':>16}")
for t, thr in zip(durations, thresholds):
    active = sw.predicts_activation(12.0, t, model)
    print(f"{t:>10.0f}{thr:>12.2f}{str(active):>16}")

path = os.path.join(OUT, "sd_curve.csv")
with open(path, "w", newline="") as fh:
    writer = csv.writer(fh)
    writer.writerow(["duration_us", "threshold_amplitude"])
    writer.writerows(zip(durations, thresholds))
print(f"\nwrote {path}")

# Fitting recovers the model from measurements. With clean points the
# generating parameters come straight back; with noisy points the fit is a
# least-squares estimate whose residual tells you how well the hyperbola
# explains the data.
points = [(t, sw.threshold_amplitude(t, model)) for t in durations]
fit = sw.fit_sd_model(points)
print(f"\nnoiseless fit: rheobase {fit.model.rheobase:.6f}, "
      f"chronaxie {fit.model.chronaxie_us:.4f} us, residual {fit.residual_rms:.2e}")

rng = np.random.default_rng(3)
noisy = [(t, y + rng.normal(0, 0.2)) for t, y in points]
fit = sw.fit_sd_model(noisy)
print(f"noisy fit:     rheobase {fit.model.rheobase:.3f}, "
      f"chronaxie {fit.model.chronaxie_us:.1f} us, residual {fit.residual_rms:.3f}")
