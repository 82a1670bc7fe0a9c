"""Small unit-conversion helpers shared across modules."""

from __future__ import annotations

import math


def db_to_linear(gain_db: float) -> float:
    """Decibels to linear amplitude factor (0 dB -> exactly 1.0)."""
    if gain_db == 0.0:
        return 1.0
    return 10.0 ** (gain_db / 20.0)


def round_count(x: float) -> int:
    """Round a non-negative sample count half-up (23.04 -> 23, 38.5 -> 39).

    Built-in round() ties to even, which makes quantized widths depend on
    parity; half-up keeps the mapping monotone.
    """
    return int(math.floor(x + 0.5))
