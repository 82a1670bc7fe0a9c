"""Safety envelopes: validation and clamping of stimulation parameters.

The default envelope is conservative: the commonly used band is 1-150 Hz with
30-800 us pulse widths; frequencies above that are harder to perceive and heat
risk grows, so the hard ceiling stays at 500 Hz and anything above the typical
band passes with a warning. Long continuous sessions warn rather than reject.
The envelope is a parameter everywhere it is used, but widening it should take
a deliberate step (a file or code), never a UI control.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Optional, Union

from .errors import ParameterError
from .synth import PulseTrainParams, RussianParams, Shape, WaveformSpec

Params = Union[PulseTrainParams, RussianParams]


class Severity(str, enum.Enum):
    HARD = "hard"          # outside the permitted range: reject
    WARNING = "warning"    # legal but outside the typical range


class Verdict(str, enum.Enum):
    PASS = "pass"
    PASS_WITH_WARNINGS = "pass_with_warnings"
    REJECT = "reject"


def _check_interval(name, interval):
    lo, hi = interval
    if not (0 < lo <= hi):
        raise ParameterError(f"{name} must be a non-empty interval with positive bounds, got {interval}")
    return (float(lo), float(hi))


@dataclass(frozen=True)
class SafetyEnvelope:
    """Permitted (hard) and typical ranges for stimulation parameters."""

    freq_hard: tuple = (1.0, 500.0)
    freq_typical: tuple = (1.0, 150.0)
    width_hard: tuple = (30.0, 800.0)
    max_continuous_s: float = 300.0
    russian_burst_rate_hard: tuple = (1.0, 150.0)

    def __post_init__(self):
        object.__setattr__(self, "freq_hard", _check_interval("freq_hard", self.freq_hard))
        object.__setattr__(self, "freq_typical", _check_interval("freq_typical", self.freq_typical))
        object.__setattr__(self, "width_hard", _check_interval("width_hard", self.width_hard))
        object.__setattr__(
            self,
            "russian_burst_rate_hard",
            _check_interval("russian_burst_rate_hard", self.russian_burst_rate_hard),
        )
        if not (self.freq_hard[0] <= self.freq_typical[0] and self.freq_typical[1] <= self.freq_hard[1]):
            raise ParameterError(
                f"freq_typical {self.freq_typical} must lie within freq_hard {self.freq_hard}"
            )
        if self.max_continuous_s <= 0:
            raise ParameterError(f"max_continuous_s must be > 0, got {self.max_continuous_s}")

    def to_dict(self) -> dict:
        return {
            "freq_hard": list(self.freq_hard),
            "freq_typical": list(self.freq_typical),
            "width_hard": list(self.width_hard),
            "max_continuous_s": self.max_continuous_s,
            "russian_burst_rate_hard": list(self.russian_burst_rate_hard),
        }

    @classmethod
    def from_dict(cls, mapping: dict) -> "SafetyEnvelope":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(mapping) - known
        if unknown:
            raise ParameterError(f"unknown envelope fields: {sorted(unknown)}")
        kwargs = {}
        for key, value in mapping.items():
            kwargs[key] = tuple(value) if isinstance(value, (list, tuple)) else value
        return cls(**kwargs)


DEFAULT_ENVELOPE = SafetyEnvelope()


@dataclass(frozen=True)
class Finding:
    parameter: str
    bound: tuple
    severity: Severity
    message: str

    def to_dict(self) -> dict:
        return {
            "parameter": self.parameter,
            "bound": list(self.bound),
            "severity": self.severity.value,
            "message": self.message,
        }


@dataclass(frozen=True)
class ValidationReport:
    verdict: Verdict
    findings: tuple = ()

    @property
    def ok(self) -> bool:
        return self.verdict is not Verdict.REJECT

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "findings": [f.to_dict() for f in self.findings],
        }

    def summary(self) -> str:
        lines = [f"verdict: {self.verdict.value}"]
        for f in self.findings:
            lines.append(f"  [{f.severity.value}] {f.parameter}: {f.message}")
        return "\n".join(lines)


def _build_report(findings) -> ValidationReport:
    findings = tuple(findings)
    if any(f.severity is Severity.HARD for f in findings):
        verdict = Verdict.REJECT
    elif findings:
        verdict = Verdict.PASS_WITH_WARNINGS
    else:
        verdict = Verdict.PASS
    return ValidationReport(verdict, findings)


def validate(
    spec: WaveformSpec,
    params: Params,
    envelope: SafetyEnvelope = DEFAULT_ENVELOPE,
    duration_s: Optional[float] = None,
) -> ValidationReport:
    """Check parameters against the envelope; never raises, the report is the output.

    For Russian current the frequency check applies to the burst rate; the
    carrier is definitional and exempt. An over-long continuous duration is a
    warning, not a rejection.
    """
    findings = []
    if isinstance(params, RussianParams):
        rate = params.burst_rate_hz
        lo, hi = envelope.russian_burst_rate_hard
        if not (lo <= rate <= hi):
            findings.append(Finding(
                "burst_rate_hz", envelope.russian_burst_rate_hard, Severity.HARD,
                f"burst rate {rate:g} Hz outside permitted [{lo:g}, {hi:g}] Hz",
            ))
    else:
        f = params.frequency_hz
        lo, hi = envelope.freq_hard
        if not (lo <= f <= hi):
            findings.append(Finding(
                "frequency_hz", envelope.freq_hard, Severity.HARD,
                f"frequency {f:g} Hz outside permitted [{lo:g}, {hi:g}] Hz",
            ))
        else:
            tlo, thi = envelope.freq_typical
            if not (tlo <= f <= thi):
                findings.append(Finding(
                    "frequency_hz", envelope.freq_typical, Severity.WARNING,
                    f"frequency {f:g} Hz outside typical [{tlo:g}, {thi:g}] Hz",
                ))
        w = params.pulse_width_us
        wlo, whi = envelope.width_hard
        if not (wlo <= w <= whi):
            findings.append(Finding(
                "pulse_width_us", envelope.width_hard, Severity.HARD,
                f"pulse width {w:g} us outside permitted [{wlo:g}, {whi:g}] us",
            ))
    if duration_s is not None and duration_s > envelope.max_continuous_s:
        findings.append(Finding(
            "duration_s", (0.0, envelope.max_continuous_s), Severity.WARNING,
            f"continuous duration {duration_s:g} s exceeds {envelope.max_continuous_s:g} s",
        ))
    return _build_report(findings)


def clamp(
    spec: WaveformSpec,
    params: Params,
    envelope: SafetyEnvelope = DEFAULT_ENVELOPE,
) -> Params:
    """Move each out-of-hard-range scalar to the nearest hard bound.

    The result always passes `validate` without rejection. Russian burst rates
    are clamped by scaling burst and interburst durations together, preserving
    the duty cycle.
    """
    if isinstance(params, RussianParams):
        rate = params.burst_rate_hz
        lo, hi = envelope.russian_burst_rate_hard
        target = min(max(rate, lo), hi)
        if target != rate:
            scale = rate / target  # total period scales inversely with rate
            params = replace(
                params,
                burst_ms=params.burst_ms * scale,
                interburst_ms=params.interburst_ms * scale,
            )
        return params
    f = min(max(params.frequency_hz, envelope.freq_hard[0]), envelope.freq_hard[1])
    w = min(max(params.pulse_width_us, envelope.width_hard[0]), envelope.width_hard[1])
    if f != params.frequency_hz or w != params.pulse_width_us:
        params = replace(params, frequency_hz=f, pulse_width_us=w)
    return params
