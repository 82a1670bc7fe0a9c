"""Wire protocol: JSON objects, one per line, over a duplex byte stream.

Requests carry an ``id`` and a ``kind``; every request gets exactly one reply
with the same ``id`` and an ``ok`` flag. Kinds: hello, set_params, start,
stop, emergency_stop, rearm, status.

Byte-level examples (newline-terminated):

    -> {"id": 1, "kind": "hello"}
    <- {"id": 1, "ok": true, "role": "controller", "protocol": 1, ...}
    -> {"id": 2, "kind": "set_params", "spec": {"shape": "square",
        "polarity": "biphasic"}, "params": {"frequency_hz": 160,
        "pulse_width_us": 120, "amplitude": 0.5}}
    <- {"id": 2, "ok": true, "applied": {...}, "validation": {...},
        "effective_sample": 960, ...}
    -> {"id": 3, "kind": "start"}
    <- {"id": 3, "ok": true, "at_sample": 1024, "state": {...}}

This module only translates between wire dicts and domain objects; it does no
I/O, so the service, the test clients, and any UI share one vocabulary.
"""

from __future__ import annotations

import json
from typing import Optional, Union

from .errors import ParameterError
from .live import SessionState
from .safety import SafetyEnvelope, ValidationReport
from .synth import Polarity, PulseTrainParams, RussianParams, Shape, WaveformSpec

PROTOCOL_VERSION = 1

REQUEST_KINDS = ("hello", "set_params", "start", "stop", "emergency_stop", "rearm", "status")

Params = Union[PulseTrainParams, RussianParams]


def spec_to_dict(spec: WaveformSpec) -> dict:
    out = {"shape": spec.shape.value, "polarity": spec.polarity.value}
    if spec.interphase_gap_us:
        out["interphase_gap_us"] = spec.interphase_gap_us
    return out


def spec_from_dict(d: dict) -> WaveformSpec:
    if not isinstance(d, dict):
        raise ParameterError(f"spec must be an object, got {type(d).__name__}")
    unknown = set(d) - {"shape", "polarity", "interphase_gap_us"}
    if unknown:
        raise ParameterError(f"unknown spec fields: {sorted(unknown)}")
    if "shape" not in d:
        raise ParameterError("spec.shape is required")
    try:
        shape = Shape(d["shape"])
        polarity = Polarity(d.get("polarity", "monophasic"))
    except ValueError as exc:
        raise ParameterError(str(exc)) from exc
    return WaveformSpec(shape, polarity, interphase_gap_us=float(d.get("interphase_gap_us", 0.0)))


def params_to_dict(params: Params) -> dict:
    if isinstance(params, RussianParams):
        return {
            "carrier_hz": params.carrier_hz,
            "burst_ms": params.burst_ms,
            "interburst_ms": params.interburst_ms,
            "amplitude": params.amplitude,
            "gain_db": params.gain_db,
        }
    return {
        "frequency_hz": params.frequency_hz,
        "pulse_width_us": params.pulse_width_us,
        "amplitude": params.amplitude,
        "gain_db": params.gain_db,
    }


def _number(d: dict, name: str, default=None) -> Optional[float]:
    if name not in d:
        if default is None:
            raise ParameterError(f"params.{name} is required")
        return default
    value = d[name]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParameterError(f"params.{name} must be a number, got {value!r}")
    return float(value)


def params_from_dict(d: dict, shape: Shape) -> Params:
    if not isinstance(d, dict):
        raise ParameterError(f"params must be an object, got {type(d).__name__}")
    if shape is Shape.RUSSIAN:
        allowed = {"carrier_hz", "burst_ms", "interburst_ms", "amplitude", "gain_db"}
        unknown = set(d) - allowed
        if unknown:
            raise ParameterError(f"unknown params fields for russian: {sorted(unknown)}")
        return RussianParams(
            carrier_hz=_number(d, "carrier_hz", 2500.0),
            burst_ms=_number(d, "burst_ms", 10.0),
            interburst_ms=_number(d, "interburst_ms", 10.0),
            amplitude=_number(d, "amplitude", 1.0),
            gain_db=_number(d, "gain_db", 0.0),
        )
    allowed = {"frequency_hz", "pulse_width_us", "amplitude", "gain_db"}
    unknown = set(d) - allowed
    if unknown:
        raise ParameterError(f"unknown params fields: {sorted(unknown)}")
    return PulseTrainParams(
        frequency_hz=_number(d, "frequency_hz"),
        pulse_width_us=_number(d, "pulse_width_us"),
        amplitude=_number(d, "amplitude", 1.0),
        gain_db=_number(d, "gain_db", 0.0),
    )


def state_to_dict(state: SessionState) -> dict:
    return {
        "run_state": state.run_state.value,
        "spec": spec_to_dict(state.spec),
        "params": params_to_dict(state.params),
        "sample_rate_hz": state.sample_rate_hz,
        "samples_emitted": state.samples_emitted,
        "uptime_s": state.uptime_s,
        "last_validation": state.last_validation.to_dict() if state.last_validation else None,
        "envelope": state.envelope.to_dict(),
    }


def report_to_dict(report: Optional[ValidationReport]) -> Optional[dict]:
    return report.to_dict() if report is not None else None


def envelope_to_dict(envelope: SafetyEnvelope) -> dict:
    return envelope.to_dict()


def encode_line(obj: dict) -> bytes:
    """One wire frame: compact JSON plus the newline terminator."""
    return json.dumps(obj, separators=(",", ":"), allow_nan=False).encode("utf-8") + b"\n"


def decode_line(line: bytes) -> dict:
    """Parse one frame; raises ParameterError on anything but a JSON object."""
    try:
        obj = json.loads(line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParameterError(f"frame is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ParameterError(f"frame must be a JSON object, got {type(obj).__name__}")
    return obj


def parse_request(obj: dict) -> tuple:
    """Validate a request frame; returns (id, kind). The id may be any JSON scalar."""
    if "kind" not in obj:
        raise ParameterError("request is missing 'kind'")
    kind = obj["kind"]
    if kind not in REQUEST_KINDS:
        raise ParameterError(f"unknown kind {kind!r} (expected one of {', '.join(REQUEST_KINDS)})")
    if "id" not in obj:
        raise ParameterError("request is missing 'id'")
    rid = obj["id"]
    if isinstance(rid, (dict, list)):
        raise ParameterError("request id must be a scalar")
    return rid, kind
