"""Command-line interface: subcommands, exit codes, end-to-end round trips.

Exit-code contract under test: 0 ok, 2 safety reject, 3 parse error, 4 I/O.
"""

import re
import subprocess
import sys
import time

import numpy as np
import pytest

from stimwave.buffer import SampleBuffer
from stimwave.cli import main
from stimwave.wavio import Encoding, WavFormat, read_wav, write_wav

FIG_ARGS = ["--shape", "square", "--polarity", "biphasic",
            "--freq", "160", "--width", "120", "--dur", "1",
            "--amplitude", "0.5"]

GOOD_PROGRAM = """\
version: 1
segments:
  - shape: square
    polarity: biphasic
    frequency_hz: 100.0
    pulse_width_us: 200.0
    amplitude: 0.5
    duration_s: 0.25
"""

REJECTED_PROGRAM = GOOD_PROGRAM.replace("pulse_width_us: 200.0",
                                        "pulse_width_us: 900.0")


def run_cli(*argv):
    try:
        return main(list(argv))
    except SystemExit as exc:  # argparse-level errors
        return exc.code


# -- render -----------------------------------------------------------------------

def test_render_inline_passes_analyzer_round_trip(tmp_path, capsys):
    out = tmp_path / "fig.wav"
    assert run_cli("render", *FIG_ARGS, "-o", str(out)) == 0
    printed = capsys.readouterr().out
    assert "pass_with_warnings" in printed  # 160 Hz sits above typical range
    assert "wrote" in printed

    assert run_cli("analyze", str(out)) == 0
    report = capsys.readouterr().out
    assert "pulse_count: 160" in report
    assert "detected_frequency_hz: 160" in report
    assert "detected_pulse_width_samples: 23" in report


def test_render_rejected_params_exit_2(tmp_path, capsys):
    out = tmp_path / "x.wav"
    code = run_cli("render", "--shape", "square", "--freq", "1000",
                   "--width", "120", "--dur", "1", "-o", str(out))
    assert code == 2
    assert "reject" in capsys.readouterr().out
    assert not out.exists()


def test_render_clamp_pulls_into_envelope(tmp_path, capsys):
    out = tmp_path / "x.wav"
    code = run_cli("render", "--shape", "square", "--freq", "1000",
                   "--width", "120", "--dur", "1", "--clamp", "-o", str(out))
    assert code == 0
    printed = capsys.readouterr().out
    assert "clamped" in printed
    assert "500" in printed
    assert out.exists()


def test_render_russian_inline(tmp_path, capsys):
    out = tmp_path / "rus.wav"
    code = run_cli("render", "--shape", "russian", "--dur", "1",
                   "--rate", "48000", "--amplitude", "0.8", "-o", str(out))
    assert code == 0
    samples = read_wav(str(out)).samples
    assert len(samples) == 48_000
    assert run_cli("analyze", str(out)) == 0
    assert "dominant_spectral_hz: 2500" in capsys.readouterr().out


def test_render_russian_rejects_pulse_flags(tmp_path):
    code = run_cli("render", "--shape", "russian", "--freq", "50",
                   "--dur", "1", "-o", str(tmp_path / "x.wav"))
    assert code == 3


def test_render_program_file(tmp_path, capsys):
    prog = tmp_path / "prog.yaml"
    prog.write_text(GOOD_PROGRAM)
    out = tmp_path / "prog.wav"
    assert run_cli("render", str(prog), "-o", str(out), "--rate", "48000") == 0
    assert len(read_wav(str(out)).samples) == 12_000  # 0.25 s at 48 kHz


def test_render_program_safety_reject_exit_2(tmp_path, capsys):
    prog = tmp_path / "bad.yaml"
    prog.write_text(REJECTED_PROGRAM)
    code = run_cli("render", str(prog), "-o", str(tmp_path / "x.wav"))
    assert code == 2
    assert "reject" in capsys.readouterr().out


def test_render_program_parse_error_exit_3(tmp_path):
    prog = tmp_path / "broken.yaml"
    prog.write_text("version: 1\nsegments: [}\n")
    assert run_cli("render", str(prog), "-o", str(tmp_path / "x.wav")) == 3


def test_render_flag_conflicts_are_parse_errors(tmp_path):
    prog = tmp_path / "prog.yaml"
    prog.write_text(GOOD_PROGRAM)
    out = str(tmp_path / "x.wav")
    # both a program file and inline flags
    assert run_cli("render", str(prog), "--shape", "sine", "--freq", "100",
                   "--width", "200", "--dur", "1", "-o", out) == 3
    # neither
    assert run_cli("render", "-o", out) == 3
    # inline without duration
    assert run_cli("render", "--shape", "sine", "--freq", "100",
                   "--width", "200", "-o", out) == 3
    # program + --clamp
    assert run_cli("render", str(prog), "--clamp", "-o", out) == 3


def test_render_unwritable_output_exit_4(tmp_path):
    assert run_cli("render", *FIG_ARGS,
                   "-o", str(tmp_path / "no" / "dir" / "x.wav")) == 4


def test_render_envelope_file_widens_bounds(tmp_path, capsys):
    env = tmp_path / "env.yaml"
    env.write_text("width_hard: [30, 5000]\n")
    out = tmp_path / "wide.wav"
    # 900 us is rejected under defaults but allowed by the widened envelope
    code = run_cli("render", "--shape", "square", "--freq", "100",
                   "--width", "900", "--dur", "0.5", "--amplitude", "0.5",
                   "--envelope", str(env), "-o", str(out))
    assert code == 0
    assert out.exists()
    code = run_cli("render", "--shape", "square", "--freq", "100",
                   "--width", "900", "--dur", "0.5", "-o", str(out))
    assert code == 2
    capsys.readouterr()


def test_render_pcm16_format(tmp_path):
    out = tmp_path / "p.wav"
    assert run_cli("render", *FIG_ARGS, "--format", "pcm16",
                   "-o", str(out)) == 0
    decoded = read_wav(str(out))
    assert abs(decoded.samples.max() - 0.5) <= 1.0 / 32767


def test_render_gain_clipping_exit_2(tmp_path, capsys):
    code = run_cli("render", "--shape", "square", "--freq", "100",
                   "--width", "200", "--dur", "0.5", "--amplitude", "0.8",
                   "--gain", "6", "-o", str(tmp_path / "x.wav"))
    assert code == 2
    capsys.readouterr()


# -- analyze ----------------------------------------------------------------------

def test_analyze_silence_counts_zero(tmp_path, capsys):
    path = tmp_path / "quiet.wav"
    write_wav(str(path), SampleBuffer(48_000, np.zeros(4800)),
              WavFormat(48_000, Encoding.FLOAT32))
    assert run_cli("analyze", str(path)) == 0
    printed = capsys.readouterr().out
    assert "pulse_count: 0" in printed
    assert "detected_frequency_hz: -" in printed


def test_analyze_csv_single_row(tmp_path, capsys):
    out = tmp_path / "fig.wav"
    run_cli("render", *FIG_ARGS, "-o", str(out))
    capsys.readouterr()
    assert run_cli("analyze", str(out), "--csv") == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 2
    header = lines[0].split(",")
    values = lines[1].split(",")
    assert header[0] == "pulse_count"
    assert values[0] == "160"
    assert len(header) == len(values)


def test_analyze_missing_file_exit_4():
    assert run_cli("analyze", "/definitely/not/here.wav") == 4


def test_analyze_malformed_wav_exit_3(tmp_path):
    path = tmp_path / "junk.wav"
    path.write_bytes(b"RIFFxxxxJUNK" + b"\x00" * 64)
    assert run_cli("analyze", str(path)) == 3


# -- validate ---------------------------------------------------------------------

def test_validate_good_program(tmp_path, capsys):
    prog = tmp_path / "prog.yaml"
    prog.write_text(GOOD_PROGRAM)
    assert run_cli("validate", str(prog)) == 0
    printed = capsys.readouterr().out
    assert "segment 1" in printed
    assert "ok: 1 segment(s)" in printed


def test_validate_rejected_program_exit_2(tmp_path, capsys):
    prog = tmp_path / "bad.yaml"
    prog.write_text(REJECTED_PROGRAM)
    assert run_cli("validate", str(prog)) == 2
    assert "pulse_width_us" in capsys.readouterr().out


def test_validate_parse_error_exit_3(tmp_path):
    prog = tmp_path / "broken.yaml"
    prog.write_text("segments: what\n")
    assert run_cli("validate", str(prog)) == 3


def test_validate_missing_file_exit_4():
    assert run_cli("validate", "/no/such/program.yaml") == 4


# -- sd-curve ---------------------------------------------------------------------

def test_sd_curve_has_chronaxie_row_at_double_rheobase(capsys):
    assert run_cli("sd-curve", "--rheobase", "5", "--chronaxie", "200") == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "duration_us,threshold_amplitude"
    rows = {line.split(",")[0]: float(line.split(",")[1]) for line in lines[1:]}
    assert rows["200"] == 10.0  # threshold at the chronaxie is twice rheobase
    values = [float(line.split(",")[1]) for line in lines[1:]]
    assert values == sorted(values, reverse=True)  # thresholds fall with duration


def test_sd_curve_bad_flags_exit_3(capsys):
    assert run_cli("sd-curve", "--rheobase", "-1", "--chronaxie", "200") == 3
    assert run_cli("sd-curve", "--rheobase", "5", "--chronaxie", "200",
                   "--min-us", "100", "--max-us", "10") == 3
    capsys.readouterr()


# -- serve ------------------------------------------------------------------------

def test_serve_flag_errors_exit_3(capsys):
    assert run_cli("serve", "--bind", "nonsense") == 3
    assert run_cli("serve", "--bind", "0.0.0.0:0") == 3
    assert run_cli("serve", "--sink", "tape") == 3
    capsys.readouterr()


def test_serve_subprocess_round_trip():
    proc = subprocess.Popen(
        [sys.executable, "-m", "stimwave.cli", "serve",
         "--bind", "127.0.0.1:0", "--duration", "15", "--no-pace"],
        stdout=subprocess.PIPE, stderr=subprocess.STDOUT, text=True,
    )
    try:
        line = proc.stdout.readline()
        match = re.search(r"serving on ([\d.]+):(\d+)", line)
        assert match, f"no address line in {line!r}"
        from stimwave.service import ControlClient

        with ControlClient(match.group(1), int(match.group(2))) as client:
            hello = client.hello()
            assert hello["ok"] is True
            assert hello["role"] == "controller"
            assert hello["sample_rate_hz"] == 48_000
            assert client.set_params(params={"frequency_hz": 120.0,
                                             "pulse_width_us": 200.0,
                                             "amplitude": 0.5})["ok"] is True
            assert client.start()["ok"] is True
            deadline = time.monotonic() + 10.0
            emitted = 0
            while time.monotonic() < deadline:
                emitted = client.status()["state"]["samples_emitted"]
                if emitted > 0:
                    break
            assert emitted > 0
    finally:
        proc.terminate()
        proc.wait(timeout=10)


# -- top level ----------------------------------------------------------------------

def test_no_subcommand_is_a_parse_error(capsys):
    assert run_cli() == 3
    capsys.readouterr()


def test_unknown_subcommand_is_a_parse_error(capsys):
    assert run_cli("frobnicate") == 3
    capsys.readouterr()
