"""Command-line front end: render, analyze, validate, sd-curve, serve.

Exit codes, for scripting:

    0   success
    2   safety rejection (validation refused the parameters, or the output
        would clip full scale)
    3   parse error (bad flags, malformed program/envelope file, malformed WAV)
    4   I/O error (missing file, unreadable/unwritable path)

``render`` defaults to 192 kHz so narrow pulses land on enough samples;
``serve`` defaults to 48 kHz to match common audio devices.
"""

from __future__ import annotations

import argparse
import sys
import time
from typing import Optional

import numpy as np
import yaml

from .analysis import analyze
from .errors import ClippingError, ParameterError, ProgramError, StimwaveError, WavFormatError
from .physiology import SDModel, sd_curve
from .program import load_program, render_program
from .safety import DEFAULT_ENVELOPE, SafetyEnvelope, clamp, validate
from .service import ControlService, ServiceConfig
from .sinks import SinkConfig
from .synth import (
    Polarity,
    PulseTrainParams,
    RussianParams,
    Shape,
    WaveformSpec,
    render_russian,
    render_train,
)
from .wavio import Encoding, WavFormat, read_wav, write_wav

EXIT_OK = 0
EXIT_SAFETY = 2
EXIT_PARSE = 3
EXIT_IO = 4

RENDER_RATE = 192_000
SERVE_RATE = 48_000
DEFAULT_BIND = "127.0.0.1:7600"


class _Fail(Exception):
    """Internal: carries an exit code and a message to main()."""

    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    # flag mistakes are parse errors (3), not the safety-reject code argparse
    # would otherwise exit with
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def _load_envelope(path: Optional[str]) -> SafetyEnvelope:
    if path is None:
        return DEFAULT_ENVELOPE
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot read envelope file: {exc}")
    except yaml.YAMLError as exc:
        raise _Fail(EXIT_PARSE, f"envelope file is not valid YAML: {exc}")
    if not isinstance(raw, dict):
        raise _Fail(EXIT_PARSE, "envelope file must be a mapping of bounds")
    try:
        return SafetyEnvelope.from_dict(raw)
    except ParameterError as exc:
        raise _Fail(EXIT_PARSE, f"envelope file: {exc}")


def _encoding(name: str) -> Encoding:
    return Encoding.PCM16 if name == "pcm16" else Encoding.FLOAT32


# -- render ---------------------------------------------------------------------

def _inline_render(args, envelope: SafetyEnvelope):
    try:
        shape = Shape(args.shape)
        polarity = Polarity(args.polarity)
    except ValueError as exc:
        raise _Fail(EXIT_PARSE, str(exc))
    try:
        if shape is Shape.RUSSIAN:
            if args.freq is not None or args.width is not None:
                raise _Fail(EXIT_PARSE,
                            "russian takes --carrier/--burst-ms/--interburst-ms, "
                            "not --freq/--width")
            spec = WaveformSpec(shape, polarity)
            params = RussianParams(carrier_hz=args.carrier, burst_ms=args.burst_ms,
                                   interburst_ms=args.interburst_ms,
                                   amplitude=args.amplitude, gain_db=args.gain)
        else:
            if args.freq is None or args.width is None:
                raise _Fail(EXIT_PARSE, "--freq and --width are required "
                                        "for pulse shapes")
            spec = WaveformSpec(shape, polarity, interphase_gap_us=args.gap)
            params = PulseTrainParams(args.freq, args.width,
                                      amplitude=args.amplitude, gain_db=args.gain)
    except ParameterError as exc:
        raise _Fail(EXIT_PARSE, str(exc))

    report = validate(spec, params, envelope, duration_s=args.dur)
    if not report.ok:
        if not args.clamp:
            print(report.summary())
            raise _Fail(EXIT_SAFETY, "parameters rejected; use --clamp to "
                                     "pull them inside the envelope")
        params = clamp(spec, params, envelope)
        report = validate(spec, params, envelope, duration_s=args.dur)
        print("clamped to the safety envelope:")
    print(report.summary())
    try:
        if shape is Shape.RUSSIAN:
            return render_russian(params, args.dur, args.rate)
        return render_train(spec, params, args.dur, args.rate)
    except ClippingError as exc:
        raise _Fail(EXIT_SAFETY, str(exc))
    except ParameterError as exc:
        raise _Fail(EXIT_PARSE, str(exc))


def _program_render(args):
    if args.clamp:
        raise _Fail(EXIT_PARSE, "--clamp applies to inline parameters only; "
                                "edit the program file instead")
    try:
        program = load_program(args.program)
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot read program: {exc}")
    except ProgramError as exc:
        if exc.report is not None:
            print(exc.report.summary())
            raise _Fail(EXIT_SAFETY, str(exc))
        raise _Fail(EXIT_PARSE, str(exc))
    for index, finding in program.warnings:
        print(f"segment {index + 1}: [{finding.severity.value}] {finding.message}")
    return render_program(program, args.rate)


# Effective values for inline flags left unset.  The parser defaults are None
# so that cmd_render can tell "user typed --amplitude 0.8" from "flag omitted"
# and reject inline flags that a program file would silently override.
_INLINE_DEFAULTS = {"polarity": "biphasic", "amplitude": 0.8, "gain": 0.0,
                    "gap": 0.0, "carrier": 2500.0, "burst_ms": 10.0,
                    "interburst_ms": 10.0}

_INLINE_FLAGS = ("shape", "polarity", "freq", "width", "dur", "amplitude",
                 "gain", "gap", "carrier", "burst_ms", "interburst_ms",
                 "envelope")


def cmd_render(args) -> int:
    if args.program is not None:
        stray = ["--" + name.replace("_", "-") for name in _INLINE_FLAGS
                 if getattr(args, name) is not None]
        if stray:
            raise _Fail(EXIT_PARSE,
                        "a program file fixes its own parameters and envelope; "
                        f"drop {', '.join(stray)}")
        buffer = _program_render(args)
    else:
        if args.shape is None:
            raise _Fail(EXIT_PARSE, "nothing to render: give a program file "
                                    "or --shape")
        if args.dur is None:
            raise _Fail(EXIT_PARSE, "--dur is required for inline rendering")
        for name, value in _INLINE_DEFAULTS.items():
            if getattr(args, name) is None:
                setattr(args, name, value)
        buffer = _inline_render(args, _load_envelope(args.envelope))
    fmt = WavFormat(args.rate, _encoding(args.format))
    try:
        write_wav(args.output, buffer, fmt)
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot write {args.output}: {exc}")
    seconds = len(buffer.samples) / args.rate
    print(f"wrote {args.output}: {len(buffer.samples)} samples "
          f"at {args.rate} Hz ({seconds:.3f} s)")
    return EXIT_OK


# -- analyze ----------------------------------------------------------------------

def cmd_analyze(args) -> int:
    try:
        buffer = read_wav(args.wav)
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot read {args.wav}: {exc}")
    except WavFormatError as exc:
        raise _Fail(EXIT_PARSE, f"{args.wav}: {exc}")
    try:
        report = analyze(buffer)
    except ParameterError as exc:
        raise _Fail(EXIT_PARSE, f"{args.wav}: {exc}")
    data = report.to_dict()
    if args.csv:
        print(",".join(data.keys()))
        print(",".join("" if v is None else f"{v:.6g}" if isinstance(v, float)
                       else str(v) for v in data.values()))
    else:
        for key, value in data.items():
            shown = "-" if value is None else (f"{value:.6g}"
                                               if isinstance(value, float)
                                               else str(value))
            print(f"{key}: {shown}")
    return EXIT_OK


# -- validate ---------------------------------------------------------------------

def cmd_validate(args) -> int:
    try:
        program = load_program(args.program)
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot read program: {exc}")
    except ProgramError as exc:
        if exc.report is not None:
            print(exc.report.summary())
            raise _Fail(EXIT_SAFETY, str(exc))
        raise _Fail(EXIT_PARSE, str(exc))
    for i, report in enumerate(program.validation):
        print(f"segment {i + 1}: {report.summary()}")
    print(f"ok: {len(program.segments)} segment(s), "
          f"{program.total_duration_s:.3f} s total")
    return EXIT_OK


# -- sd-curve ---------------------------------------------------------------------

def cmd_sd_curve(args) -> int:
    try:
        model = SDModel(rheobase=args.rheobase, chronaxie_us=args.chronaxie)
    except ParameterError as exc:
        raise _Fail(EXIT_PARSE, str(exc))
    if args.min_us <= 0 or args.max_us <= args.min_us or args.points < 2:
        raise _Fail(EXIT_PARSE, "need 0 < --min-us < --max-us and --points >= 2")
    durations = np.geomspace(args.min_us, args.max_us, args.points)
    # the chronaxie always gets a row: it is the landmark the curve is about
    durations = np.unique(np.append(durations, args.chronaxie))
    thresholds = sd_curve(model, durations)
    print("duration_us,threshold_amplitude")
    for d, t in zip(durations, thresholds):
        print(f"{d:.6g},{t:.6g}")
    return EXIT_OK


# -- serve ------------------------------------------------------------------------

def _parse_bind(text: str) -> tuple:
    host, sep, port = text.rpartition(":")
    if not sep or not port.isdigit():
        raise _Fail(EXIT_PARSE, f"--bind wants HOST:PORT, got {text!r}")
    return host, int(port)


def _parse_sink(text: str, rate: int, encoding: Encoding) -> Optional[SinkConfig]:
    if text == "null":
        return None
    if text == "device":
        return SinkConfig("device", rate)
    if text.startswith("file:"):
        path = text[len("file:"):]
        if not path:
            raise _Fail(EXIT_PARSE, "file sink wants file:PATH")
        return SinkConfig("file", rate, encoding=encoding, path=path)
    raise _Fail(EXIT_PARSE, f"unknown sink {text!r}; use null, device, or file:PATH")


def cmd_serve(args) -> int:
    host, port = _parse_bind(args.bind)
    if host not in ("127.0.0.1", "localhost", "::1", "") and not args.allow_remote:
        raise _Fail(EXIT_PARSE,
                    f"refusing to bind {host!r}: the protocol is unauthenticated; "
                    f"pass --allow-remote to expose it beyond loopback")
    envelope = _load_envelope(args.envelope)
    sink = _parse_sink(args.sink, args.rate, _encoding(args.format))
    try:
        config = ServiceConfig(
            host=host, port=port, sample_rate_hz=args.rate,
            chunk_size=args.chunk, envelope=envelope,
            clamp_mode=args.clamp, pace=not args.no_pace,
            sink_config=sink, allow_remote=args.allow_remote,
        )
    except ParameterError as exc:
        raise _Fail(EXIT_PARSE, str(exc))
    if args.allow_remote:
        print("warning: the control protocol has no authentication; "
              "anyone who can reach this port controls the output",
              file=sys.stderr, flush=True)
    try:
        service = ControlService(config)
        service.start()
    except (OSError, StimwaveError) as exc:
        raise _Fail(EXIT_IO, f"cannot start service: {exc}")
    actual_host, actual_port = service.address[:2]
    print(f"serving on {actual_host}:{actual_port} at {args.rate} Hz "
          f"({'clamp' if args.clamp else 'reject'} mode)", flush=True)
    try:
        if args.duration > 0:
            time.sleep(args.duration)
        else:
            while True:
                time.sleep(0.5)
    except KeyboardInterrupt:
        pass
    finally:
        service.shutdown()
    return EXIT_OK


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stimwave",
                     description="Synthesize, inspect, and serve electrical "
                                 "muscle stimulation waveforms.")
    sub = parser.add_subparsers(dest="command", required=True)

    render = sub.add_parser("render", help="render a program file or inline "
                                           "parameters to a WAV file")
    render.add_argument("program", nargs="?", default=None,
                        help="program file (YAML); omit to use inline flags")
    render.add_argument("-o", "--output", required=True, help="output WAV path")
    render.add_argument("--rate", type=int, default=RENDER_RATE,
                        help=f"sample rate in Hz (default {RENDER_RATE})")
    render.add_argument("--format", choices=("float32", "pcm16"),
                        default="float32", help="WAV sample format")
    render.add_argument("--shape",
                        choices=("sine", "triangle", "saw", "square", "russian"),
                        default=None, help="inline: waveform shape")
    render.add_argument("--polarity", choices=("monophasic", "biphasic"),
                        default=None, help="inline: pulse polarity")
    render.add_argument("--freq", type=float, default=None,
                        help="inline: pulse repetition frequency in Hz")
    render.add_argument("--width", type=float, default=None,
                        help="inline: pulse width in microseconds")
    render.add_argument("--dur", type=float, default=None,
                        help="inline: render duration in seconds")
    render.add_argument("--amplitude", type=float, default=None,
                        help="inline: peak amplitude, 0..1 (default 0.8)")
    render.add_argument("--gain", type=float, default=None,
                        help="inline: gain offset in dB (default 0)")
    render.add_argument("--gap", type=float, default=None,
                        help="inline: interphase gap in microseconds")
    render.add_argument("--carrier", type=float, default=None,
                        help="inline russian: carrier frequency in Hz")
    render.add_argument("--burst-ms", type=float, default=None,
                        help="inline russian: burst length in ms")
    render.add_argument("--interburst-ms", type=float, default=None,
                        help="inline russian: interburst rest in ms")
    render.add_argument("--envelope", default=None,
                        help="safety envelope YAML (inline rendering)")
    render.add_argument("--clamp", action="store_true",
                        help="pull rejected inline parameters inside the "
                             "envelope instead of exiting")
    render.set_defaults(func=cmd_render)

    analyze_p = sub.add_parser("analyze", help="measure a WAV file: pulse count, "
                                               "frequency, width, DC, RMS, spectrum")
    analyze_p.add_argument("wav", help="input WAV path")
    analyze_p.add_argument("--csv", action="store_true",
                           help="machine-readable one-row CSV")
    analyze_p.set_defaults(func=cmd_analyze)

    validate_p = sub.add_parser("validate", help="check a program file against "
                                                 "its safety envelope")
    validate_p.add_argument("program", help="program file (YAML)")
    validate_p.set_defaults(func=cmd_validate)

    sd = sub.add_parser("sd-curve", help="print a strength-duration threshold "
                                         "curve as CSV")
    sd.add_argument("--rheobase", type=float, required=True,
                    help="asymptotic threshold amplitude")
    sd.add_argument("--chronaxie", type=float, required=True,
                    help="chronaxie in microseconds")
    sd.add_argument("--min-us", type=float, default=10.0,
                    help="shortest duration (default 10)")
    sd.add_argument("--max-us", type=float, default=10000.0,
                    help="longest duration (default 10000)")
    sd.add_argument("--points", type=int, default=50,
                    help="number of log-spaced rows (default 50)")
    sd.set_defaults(func=cmd_sd_curve)

    serve = sub.add_parser("serve", help="run the live control service")
    serve.add_argument("--bind", default=DEFAULT_BIND,
                       help=f"HOST:PORT to listen on (default {DEFAULT_BIND}; "
                            f"port 0 picks a free port)")
    serve.add_argument("--rate", type=int, default=SERVE_RATE,
                       help=f"sample rate in Hz (default {SERVE_RATE})")
    serve.add_argument("--chunk", type=int, default=256,
                       help="render chunk size in samples (default 256)")
    serve.add_argument("--sink", default="null",
                       help="output sink: null, device, or file:PATH "
                            "(default null)")
    serve.add_argument("--format", choices=("float32", "pcm16"),
                       default="float32", help="file sink sample format")
    serve.add_argument("--envelope", default=None,
                       help="safety envelope YAML overriding the default")
    serve.add_argument("--clamp", action="store_true",
                       help="clamp out-of-envelope updates instead of refusing")
    serve.add_argument("--no-pace", action="store_true",
                       help="render as fast as possible instead of tracking "
                            "wall-clock time")
    serve.add_argument("--duration", type=float, default=0.0,
                       help="serve for N seconds then exit (default: forever)")
    serve.add_argument("--allow-remote", action="store_true",
                       help="permit binding beyond loopback (unauthenticated!)")
    serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _Fail as exc:
        print(f"stimwave: {exc}", file=sys.stderr)
        return exc.code
    except StimwaveError as exc:
        # anything a subcommand did not map explicitly is a parameter problem
        print(f"stimwave: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
