"""Strength-duration threshold model (rheobase / chronaxie hyperbola).

The threshold amplitude for a rectangular pulse of duration t follows the
classical hyperbolic law ``threshold(t) = rheobase * (1 + chronaxie / t)``:
rheobase is the asymptotic threshold for very long pulses, chronaxie the
duration at which the threshold is exactly twice the rheobase.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FitError, ParameterError


@dataclass(frozen=True)
class SDModel:
    rheobase: float
    chronaxie_us: float

    def __post_init__(self):
        if not (self.rheobase > 0 and np.isfinite(self.rheobase)):
            raise ParameterError(f"rheobase must be > 0, got {self.rheobase}")
        if not (self.chronaxie_us > 0 and np.isfinite(self.chronaxie_us)):
            raise ParameterError(f"chronaxie_us must be > 0, got {self.chronaxie_us}")


@dataclass(frozen=True)
class SDFit:
    """A fitted model plus the residual of the least-squares solve."""

    model: SDModel
    residual_rms: float


def threshold_amplitude(duration_us: float, model: SDModel) -> float:
    """Threshold amplitude at a given pulse duration (same units as rheobase)."""
    if not (duration_us > 0):
        raise ParameterError(f"duration_us must be > 0, got {duration_us}")
    return model.rheobase * (1.0 + model.chronaxie_us / duration_us)


def predicts_activation(pulse_amplitude: float, pulse_width_us: float, model: SDModel) -> bool:
    """True iff the pulse reaches the strength-duration threshold (>= at the boundary)."""
    return pulse_amplitude >= threshold_amplitude(pulse_width_us, model)


def sd_curve(model: SDModel, durations_us) -> np.ndarray:
    """Vectorized threshold curve for plotting/export."""
    t = np.asarray(durations_us, dtype=np.float64)
    if np.any(t <= 0):
        raise ParameterError("durations must all be > 0")
    return model.rheobase * (1.0 + model.chronaxie_us / t)


def fit_sd_model(points) -> SDFit:
    """Least-squares fit of (duration_us, threshold) pairs to the hyperbolic law.

    The law is linear in the basis (1, 1/t): threshold = b + (b*c)/t, so an
    ordinary linear solve recovers b (rheobase) and c (chronaxie). Requires at
    least two points with distinct durations and positive thresholds.
    """
    pts = [(float(t), float(y)) for t, y in points]
    if len(pts) < 2:
        raise FitError(f"need at least 2 points, got {len(pts)}")
    t = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if np.any(t <= 0):
        raise FitError("durations must all be > 0")
    if np.any(y <= 0):
        raise FitError("thresholds must all be > 0")
    if np.unique(t).size < 2:
        raise FitError("durations are all identical; the curve is undetermined")
    design = np.column_stack([np.ones_like(t), 1.0 / t])
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < 2:
        raise FitError("degenerate design matrix; durations do not determine a curve")
    b, bc = coef
    if b <= 0 or bc <= 0:
        raise FitError(
            f"fit produced a non-physical model (rheobase {b:.6g}, rheobase*chronaxie {bc:.6g})"
        )
    model = SDModel(rheobase=float(b), chronaxie_us=float(bc / b))
    residual = y - design @ coef
    return SDFit(model=model, residual_rms=float(np.sqrt(np.mean(residual**2))))
