"""Sink contract: counting, file-sink byte identity, single-producer rule."""

import threading

import numpy as np
import pytest

from stimwave.buffer import SampleBuffer
from stimwave.errors import ParameterError, SinkError
from stimwave.sinks import FileSink, NullSink, SinkConfig, open_sink, write
from stimwave.synth import Polarity, PulseTrainParams, Shape, WaveformSpec, render_train
from stimwave.wavio import Encoding, WavFormat, encode_wav, read_wav


def chunked(samples, size):
    return [samples[i:i + size] for i in range(0, len(samples), size)]


class TestNullSink:
    def test_counts_samples(self):
        sink = NullSink(48_000)
        sink.write(np.zeros(100))
        sink.write(np.zeros(28))
        assert sink.samples_written == 128
        assert sink.underruns == 0

    def test_module_level_write(self):
        sink = open_sink(SinkConfig("null", 48_000))
        write(sink, np.zeros(5))
        assert sink.samples_written == 5

    def test_write_after_close_rejected(self):
        sink = NullSink(48_000)
        sink.close()
        with pytest.raises(SinkError):
            sink.write(np.zeros(1))

    def test_out_of_range_chunk_rejected(self):
        sink = NullSink(48_000)
        with pytest.raises(ParameterError):
            sink.write(np.array([1.5]))

    def test_non_finite_chunk_rejected(self):
        sink = NullSink(48_000)
        with pytest.raises(ParameterError):
            sink.write(np.array([np.nan]))


class TestFileSink:
    def test_bytes_identical_to_offline_encode(self, tmp_path):
        buf = render_train(WaveformSpec(Shape.SINE, Polarity.BIPHASIC),
                           PulseTrainParams(160.0, 120.0), 0.25, 192_000)
        for encoding in Encoding:
            fmt = WavFormat(192_000, encoding)
            path = tmp_path / f"stream_{encoding.value}.wav"
            with FileSink(path, fmt) as sink:
                for chunk in chunked(buf.samples, 256):
                    sink.write(chunk)
            assert path.read_bytes() == encode_wav(buf, fmt)

    def test_written_stream_decodes_to_chunk_concatenation(self, tmp_path):
        path = tmp_path / "concat.wav"
        chunks = [np.full(10, 0.25), np.full(3, -0.5), np.empty(0)]
        with FileSink(path, WavFormat(48_000)) as sink:
            for chunk in chunks:
                sink.write(chunk)
        expected = np.concatenate(chunks).astype(np.float32).astype(np.float64)
        assert read_wav(path).same_signal(SampleBuffer(48_000, expected))

    def test_empty_close_is_a_valid_file(self, tmp_path):
        path = tmp_path / "empty.wav"
        FileSink(path, WavFormat(48_000, Encoding.PCM16)).close()
        out = read_wav(path)
        assert len(out) == 0 and out.sample_rate_hz == 48_000

    def test_close_idempotent(self, tmp_path):
        sink = FileSink(tmp_path / "x.wav", WavFormat(48_000))
        sink.close()
        sink.close()


class TestSingleProducerRule:
    def test_second_thread_write_rejected(self):
        sink = NullSink(48_000)
        sink.write(np.zeros(4))
        errors = []

        def intrude():
            try:
                sink.write(np.zeros(4))
            except SinkError as exc:
                errors.append(exc)

        t = threading.Thread(target=intrude)
        t.start()
        t.join()
        assert len(errors) == 1
        assert sink.samples_written == 4

    def test_same_thread_may_keep_writing(self):
        sink = NullSink(48_000)
        for _ in range(3):
            sink.write(np.zeros(2))
        assert sink.samples_written == 6


class TestOpenSink:
    def test_unknown_kind_rejected(self):
        with pytest.raises(ParameterError):
            SinkConfig("tape", 48_000)

    def test_file_kind_needs_path(self):
        with pytest.raises(ParameterError):
            SinkConfig("file", 48_000)

    def test_file_kind_round_trip(self, tmp_path):
        path = tmp_path / "out.wav"
        sink = open_sink(SinkConfig("file", 48_000, Encoding.PCM16, str(path)))
        sink.write(np.array([1.0, -1.0]))
        sink.close()
        out = read_wav(path)
        assert out.samples.tolist() == [1.0, -1.0]

    def test_device_kind_unavailable_raises_sink_error(self):
        try:
            import sounddevice  # noqa: F401
            pytest.skip("sounddevice installed; cannot test the unavailable path")
        except ImportError:
            pass
        with pytest.raises(SinkError, match="sounddevice"):
            open_sink(SinkConfig("device", 48_000))
