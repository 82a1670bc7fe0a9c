"""WAV (RIFF) encoding and decoding for mono stimulation signals.

Two encodings are supported: 16-bit PCM with symmetric 32767 scaling and
32-bit IEEE float. Output is always a single channel; stimulation hardware
driven from an audio jack consumes one channel, and refusing multichannel
files keeps the decode path unambiguous.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass

import numpy as np

from .buffer import SampleBuffer
from .errors import ParameterError, WavFormatError

SUPPORTED_RATES = (44_100, 48_000, 96_000, 192_000)

_FORMAT_PCM = 1
_FORMAT_IEEE_FLOAT = 3


class Encoding(str, enum.Enum):
    PCM16 = "pcm16"
    FLOAT32 = "float32"


@dataclass(frozen=True)
class WavFormat:
    """Container parameters for a WAV file.

    Args:
        sample_rate_hz: one of 44100, 48000, 96000, 192000.
        encoding: Encoding.PCM16 or Encoding.FLOAT32.
        channels: always 1; present so decoded formats are self-describing.
    """

    sample_rate_hz: int
    encoding: Encoding = Encoding.FLOAT32
    channels: int = 1

    def __post_init__(self):
        if self.sample_rate_hz not in SUPPORTED_RATES:
            raise ParameterError(
                f"sample_rate_hz must be one of {SUPPORTED_RATES}, got {self.sample_rate_hz!r}")
        object.__setattr__(self, "encoding", Encoding(self.encoding))
        if self.channels != 1:
            raise ParameterError(f"only mono output is supported, got {self.channels} channels")


def _encode_pcm16(samples: np.ndarray) -> bytes:
    scaled = samples * 32767.0
    # round half away from zero, so +/-1.0 maps to exactly +/-32767
    quantized = np.copysign(np.floor(np.abs(scaled) + 0.5), scaled)
    quantized = np.clip(quantized, -32768, 32767)
    return quantized.astype("<i2").tobytes()


def encode_payload(samples: np.ndarray, fmt: WavFormat) -> bytes:
    """Encode raw samples to the data-chunk byte layout for the format."""
    if fmt.encoding is Encoding.PCM16:
        return _encode_pcm16(samples)
    return samples.astype("<f4").tobytes()


def header_bytes(fmt: WavFormat, frames: int) -> bytes:
    """Everything before the data-chunk payload for a file of `frames` samples.

    Shared by the one-shot encoder and the streaming file sink so both
    produce byte-identical output.
    """
    if fmt.encoding is Encoding.PCM16:
        bits, format_code = 16, _FORMAT_PCM
    else:
        bits, format_code = 32, _FORMAT_IEEE_FLOAT
    block_align = bits // 8  # mono
    byte_rate = fmt.sample_rate_hz * block_align
    payload_len = frames * block_align

    chunks = []
    if format_code == _FORMAT_PCM:
        chunks.append(b"fmt " + struct.pack(
            "<IHHIIHH", 16, format_code, 1, fmt.sample_rate_hz, byte_rate, block_align, bits))
    else:
        # non-PCM: 18-byte fmt (cbSize 0) plus a fact chunk with the frame count
        chunks.append(b"fmt " + struct.pack(
            "<IHHIIHHH", 18, format_code, 1, fmt.sample_rate_hz, byte_rate, block_align, bits, 0))
        chunks.append(b"fact" + struct.pack("<II", 4, frames))
    chunks.append(b"data" + struct.pack("<I", payload_len))

    body_len = 4 + sum(len(c) for c in chunks) + payload_len
    return b"RIFF" + struct.pack("<I", body_len) + b"WAVE" + b"".join(chunks)


def encode_wav(buffer: SampleBuffer, fmt: WavFormat) -> bytes:
    """Serialize a SampleBuffer to a RIFF/WAVE byte string.

    The buffer's sample rate must equal the format's. pcm16 quantizes with
    symmetric 32767 scaling (round half away from zero); float32 stores each
    sample rounded to the nearest 32-bit float and includes the fact chunk
    required for non-PCM format codes.
    """
    if buffer.sample_rate_hz != fmt.sample_rate_hz:
        raise ParameterError(
            f"buffer rate {buffer.sample_rate_hz} does not match format rate {fmt.sample_rate_hz}")
    return header_bytes(fmt, len(buffer)) + encode_payload(buffer.samples, fmt)


def decode_wav(data: bytes) -> SampleBuffer:
    """Parse RIFF/WAVE bytes back into a SampleBuffer.

    Exact inverse of encode_wav for float32; within 1/32767 per sample for
    pcm16 (the stored value -32768, producible by other writers, decodes to
    -1.0). Unknown chunks are skipped. Raises WavFormatError on anything
    malformed, multichannel, or in an unsupported encoding.
    """
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise WavFormatError("not a RIFF/WAVE file")
    declared = struct.unpack("<I", data[4:8])[0]
    if declared + 8 > len(data):
        raise WavFormatError("RIFF size field exceeds available bytes")

    fmt_fields = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        cid = data[pos:pos + 4]
        size = struct.unpack("<I", data[pos + 4:pos + 8])[0]
        body_start = pos + 8
        if body_start + size > len(data):
            raise WavFormatError(f"chunk {cid!r} truncated: declares {size} bytes past end of file")
        body = data[body_start:body_start + size]
        if cid == b"fmt ":
            if size < 16:
                raise WavFormatError(f"fmt chunk too short ({size} bytes)")
            fmt_fields = struct.unpack("<HHIIHH", body[:16])
        elif cid == b"data":
            payload = body
        pos = body_start + size + (size % 2)

    if fmt_fields is None:
        raise WavFormatError("missing fmt chunk")
    if payload is None:
        raise WavFormatError("missing data chunk")

    format_code, channels, rate, _byte_rate, _block_align, bits = fmt_fields
    if channels != 1:
        raise WavFormatError(f"only mono files are supported, got {channels} channels")
    if rate not in SUPPORTED_RATES:
        raise WavFormatError(f"unsupported sample rate {rate}")

    if format_code == _FORMAT_PCM and bits == 16:
        if len(payload) % 2:
            raise WavFormatError("pcm16 data chunk has odd byte length")
        raw = np.frombuffer(payload, dtype="<i2").astype(np.float64)
        samples = np.maximum(raw, -32767.0) / 32767.0
    elif format_code == _FORMAT_IEEE_FLOAT and bits == 32:
        if len(payload) % 4:
            raise WavFormatError("float32 data chunk length is not a multiple of 4")
        samples = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    else:
        raise WavFormatError(f"unsupported encoding (format code {format_code}, {bits} bits)")

    try:
        return SampleBuffer(rate, samples)
    except ParameterError as exc:
        # files from other writers may carry out-of-range or non-finite floats
        raise WavFormatError(f"sample content not usable: {exc}") from exc


def write_wav(path, buffer: SampleBuffer, fmt: WavFormat) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_wav(buffer, fmt))


def read_wav(path) -> SampleBuffer:
    with open(path, "rb") as fh:
        return decode_wav(fh.read())
