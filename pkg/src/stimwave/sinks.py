"""Audio sinks: where rendered chunks go during live streaming.

Three backends share one contract: chunks are delivered in order by exactly
one producer, the sink counts what it consumed, and underruns surface as a
counter plus an optional callback rather than as silently substituted data.

* NullSink discards samples (dry runs, latency tests).
* FileSink streams to a WAV whose final bytes are identical to a one-shot
  encode of the same sample stream.
* DeviceSink plays through an output device when the optional sounddevice
  package is available.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .buffer import FULL_SCALE_TOLERANCE
from .errors import ParameterError, SinkError
from .wavio import Encoding, WavFormat, encode_payload, header_bytes


@dataclass(frozen=True)
class SinkConfig:
    """How to open a sink.

    kind: "null", "file", or "device".
    path: target file, required for kind="file".
    queue_chunks: bound on the device queue; the producer blocks when full.
    """

    kind: str
    sample_rate_hz: int
    encoding: Encoding = Encoding.FLOAT32
    path: Optional[str] = None
    queue_chunks: int = 8

    def __post_init__(self):
        if self.kind not in ("null", "file", "device"):
            raise ParameterError(f"unknown sink kind {self.kind!r}")
        if self.kind == "file" and not self.path:
            raise ParameterError("file sink requires a path")
        if self.queue_chunks < 1:
            raise ParameterError("queue_chunks must be at least 1")


class AudioSink:
    """Base sink: ordering, range checks, and the single-producer rule."""

    def __init__(self, sample_rate_hz: int,
                 on_underrun: Optional[Callable[[int], None]] = None):
        self.sample_rate_hz = int(sample_rate_hz)
        self.samples_written = 0
        self.underruns = 0
        self.on_underrun = on_underrun
        self._producer: Optional[int] = None
        self._closed = False

    def write(self, chunk) -> None:
        """Accept the next chunk of the stream, in order.

        The first call binds the producer; calls from any other thread are a
        contract violation (two producers cannot maintain chunk order).
        """
        if self._closed:
            raise SinkError("write to a closed sink")
        ident = threading.get_ident()
        if self._producer is None:
            self._producer = ident
        elif ident != self._producer:
            raise SinkError("sink already has a producer; writes from a second "
                            "thread would interleave chunks out of order")
        arr = np.asarray(chunk, dtype=np.float64)
        if arr.ndim != 1:
            raise ParameterError(f"chunk must be one-dimensional, got shape {arr.shape}")
        if arr.size:
            if not np.all(np.isfinite(arr)):
                raise ParameterError("chunk samples must be finite")
            peak = float(np.max(np.abs(arr)))
            if peak > 1.0 + FULL_SCALE_TOLERANCE:
                raise ParameterError(f"chunk exceeds full scale (peak {peak:.9g})")
        self._consume(arr)
        self.samples_written += arr.size

    def _note_underrun(self) -> None:
        self.underruns += 1
        if self.on_underrun is not None:
            self.on_underrun(self.underruns)

    def _consume(self, arr: np.ndarray) -> None:
        raise NotImplementedError

    def close(self) -> None:
        self._closed = True

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False


class NullSink(AudioSink):
    """Discards every chunk; only the counters remain."""

    def _consume(self, arr: np.ndarray) -> None:
        pass


class FileSink(AudioSink):
    """Streams chunks into a WAV file.

    A placeholder header goes out first; each chunk's payload is appended as
    it arrives, and close() rewrites the header with the final frame count.
    The resulting bytes equal encode_wav of the concatenated chunks because
    both paths share the same header builder and payload encoder.
    """

    def __init__(self, path, fmt: WavFormat,
                 on_underrun: Optional[Callable[[int], None]] = None):
        super().__init__(fmt.sample_rate_hz, on_underrun)
        self.path = path
        self.format = fmt
        self._fh = open(path, "wb")
        self._fh.write(header_bytes(fmt, 0))

    def _consume(self, arr: np.ndarray) -> None:
        self._fh.write(encode_payload(arr, self.format))

    def close(self) -> None:
        if not self._closed:
            self._fh.seek(0)
            self._fh.write(header_bytes(self.format, self.samples_written))
            self._fh.close()
        super().close()


class DeviceSink(AudioSink):
    """Plays chunks on an audio output device via the sounddevice package.

    The producer and the device callback meet at a bounded queue: a full
    queue blocks the producer (backpressure), an empty one at callback time
    is an underrun, reported and filled with zeros for that block.
    """

    def __init__(self, sample_rate_hz: int, queue_chunks: int = 8,
                 on_underrun: Optional[Callable[[int], None]] = None):
        super().__init__(sample_rate_hz, on_underrun)
        try:
            import sounddevice
        except ImportError as exc:
            raise SinkError("device sink requires the sounddevice package") from exc
        import queue

        self._queue: "queue.Queue[np.ndarray]" = queue.Queue(maxsize=queue_chunks)
        self._pending = np.empty(0)

        def callback(outdata, frames, time_info, status):
            out = np.zeros(frames)
            filled = 0
            pending = self._pending
            while filled < frames:
                if pending.size == 0:
                    try:
                        pending = self._queue.get_nowait()
                    except queue.Empty:
                        if filled == 0:
                            self._note_underrun()
                        break
                take = min(frames - filled, pending.size)
                out[filled:filled + take] = pending[:take]
                pending = pending[take:]
                filled += take
            self._pending = pending
            outdata[:, 0] = out

        self._stream = sounddevice.OutputStream(
            samplerate=sample_rate_hz, channels=1, callback=callback)
        self._stream.start()

    def _consume(self, arr: np.ndarray) -> None:
        if arr.size:
            self._queue.put(arr.copy())  # blocks when the queue is full

    def close(self) -> None:
        if not self._closed:
            self._stream.stop()
            self._stream.close()
        super().close()


def open_sink(config: SinkConfig,
              on_underrun: Optional[Callable[[int], None]] = None) -> AudioSink:
    """Build the sink described by the config."""
    if config.kind == "null":
        return NullSink(config.sample_rate_hz, on_underrun)
    if config.kind == "file":
        fmt = WavFormat(config.sample_rate_hz, config.encoding)
        return FileSink(config.path, fmt, on_underrun)
    return DeviceSink(config.sample_rate_hz, config.queue_chunks, on_underrun)


def write(sink: AudioSink, chunk) -> None:
    """Deliver one chunk to a sink (method form: sink.write(chunk))."""
    sink.write(chunk)
