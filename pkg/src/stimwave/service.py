"""Live control service: streams a session to a sink, steered over TCP.

One render loop owns the session. Per-connection reader threads never touch
state; they push (connection, raw line, receipt position) onto a queue that
the render loop drains between chunks, so every message is applied at a chunk
boundary and replies are written by exactly one thread. The first connection
gets the controller role; later ones are read-only observers.

Each reply that changes the stream reports three sample positions:
``received_at_sample`` (stream position when the frame arrived),
``applied_at_sample`` (the chunk boundary where it acted), and, for parameter
updates, ``effective_sample`` (the pulse onset where the new values sound).
Replaying the same updates at the same applied positions into a fresh
LiveSession reproduces the streamed samples bit for bit.
"""

from __future__ import annotations

import queue
import socket
import threading
import time
from dataclasses import dataclass
from typing import Optional

from .errors import ParameterError, StimwaveError
from .live import LiveSession, LiveUpdate, RunState
from .protocol import (
    PROTOCOL_VERSION,
    decode_line,
    encode_line,
    envelope_to_dict,
    params_from_dict,
    params_to_dict,
    parse_request,
    report_to_dict,
    spec_from_dict,
    spec_to_dict,
    state_to_dict,
)
from .safety import DEFAULT_ENVELOPE, SafetyEnvelope
from .sinks import AudioSink, NullSink, SinkConfig, open_sink
from .synth import Polarity, PulseTrainParams, Shape, WaveformSpec

DEFAULT_SPEC = WaveformSpec(Shape.SQUARE, Polarity.BIPHASIC)
DEFAULT_PARAMS = PulseTrainParams(frequency_hz=100.0, pulse_width_us=200.0, amplitude=0.5)


@dataclass
class ServiceConfig:
    """Service settings; the defaults serve a biphasic square train on loopback."""

    host: str = "127.0.0.1"
    port: int = 0  # 0 picks a free port; see ControlService.address
    sample_rate_hz: int = 48_000
    chunk_size: int = 256
    spec: WaveformSpec = DEFAULT_SPEC
    params: object = DEFAULT_PARAMS
    envelope: SafetyEnvelope = DEFAULT_ENVELOPE
    clamp_mode: bool = False
    pace: bool = True  # track wall-clock time; False renders as fast as possible
    sink_config: Optional[SinkConfig] = None  # None: null sink at sample_rate_hz
    allow_remote: bool = False  # non-loopback binds must be explicitly enabled

    def __post_init__(self):
        loopback = self.host in ("127.0.0.1", "localhost", "::1", "")
        if not loopback and not self.allow_remote:
            raise ParameterError(
                f"refusing to bind {self.host!r}: the protocol is unauthenticated; "
                f"set allow_remote=True to expose it beyond loopback")


class _Connection:
    """One client socket; writes happen only from the render loop."""

    def __init__(self, sock: socket.socket, role: str):
        self.sock = sock
        self.role = role
        self.alive = True

    def send(self, obj: dict) -> None:
        if not self.alive:
            return
        try:
            self.sock.sendall(encode_line(obj))
        except OSError:
            self.alive = False

    def close(self) -> None:
        self.alive = False
        try:
            self.sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self.sock.close()


class ControlService:
    """TCP control service around a LiveSession. Use start()/shutdown() or `with`."""

    def __init__(self, config: Optional[ServiceConfig] = None):
        config = config if config is not None else ServiceConfig()
        self.config = config
        self.last_error: Optional[str] = None
        self.session = LiveSession(
            config.spec, config.params, config.sample_rate_hz,
            envelope=config.envelope, clamp_mode=config.clamp_mode,
        )
        if config.sink_config is not None:
            self.sink: AudioSink = open_sink(config.sink_config)
        else:
            self.sink = NullSink(config.sample_rate_hz)
        self._messages: "queue.Queue[tuple]" = queue.Queue()
        self._connections: list = []
        self._conn_lock = threading.Lock()
        self._controller: Optional[_Connection] = None
        self._shutdown = threading.Event()
        self._server_sock: Optional[socket.socket] = None
        self._threads: list = []
        # the stream (and sample counting) begins at the first start command;
        # from then on it runs forever, emitting zeros while idle or stopped
        self._streaming = False

    # -- lifecycle ------------------------------------------------------------

    @property
    def address(self) -> tuple:
        return self._server_sock.getsockname()

    def start(self) -> "ControlService":
        self._server_sock = socket.create_server(
            (self.config.host, self.config.port), reuse_port=False)
        self._server_sock.settimeout(0.2)
        accept = threading.Thread(target=self._accept_loop, daemon=True, name="stimwave-accept")
        render = threading.Thread(target=self._render_loop, daemon=True, name="stimwave-render")
        self._threads = [accept, render]
        accept.start()
        render.start()
        return self

    def shutdown(self) -> None:
        self._shutdown.set()
        for t in self._threads:
            t.join(timeout=5.0)
        with self._conn_lock:
            for conn in self._connections:
                conn.close()
            self._connections.clear()
        if self._server_sock is not None:
            self._server_sock.close()
        self.sink.close()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.shutdown()
        return False

    # -- accept/read side -------------------------------------------------------

    def _accept_loop(self) -> None:
        while not self._shutdown.is_set():
            try:
                sock, _addr = self._server_sock.accept()
            except socket.timeout:
                continue
            except OSError:
                return
            with self._conn_lock:
                role = "observer" if self._controller and self._controller.alive else "controller"
                conn = _Connection(sock, role)
                if role == "controller":
                    self._controller = conn
                self._connections.append(conn)
            reader = threading.Thread(target=self._read_loop, args=(conn,), daemon=True)
            reader.start()

    def _read_loop(self, conn: _Connection) -> None:
        buf = b""
        sock = conn.sock
        sock.settimeout(0.2)
        while not self._shutdown.is_set() and conn.alive:
            try:
                data = sock.recv(4096)
            except socket.timeout:
                continue
            except OSError:
                break
            if not data:
                break
            buf += data
            if len(buf) > 1_000_000 and b"\n" not in buf:
                break  # a frame this size is not protocol traffic
            while b"\n" in buf:
                line, buf = buf.split(b"\n", 1)
                if line.strip():
                    # receipt position: stream samples emitted when the frame arrived
                    self._messages.put((conn, line, self.session.position))
        conn.alive = False

    # -- render side ------------------------------------------------------------

    def _render_loop(self) -> None:
        chunk = self.config.chunk_size
        rate = self.config.sample_rate_hz
        origin: Optional[float] = None
        while not self._shutdown.is_set():
            while True:
                try:
                    conn, line, received_at = self._messages.get_nowait()
                except queue.Empty:
                    break
                self._handle_frame(conn, line, received_at)
            if not self._streaming:
                # nothing has ever been started: stay at position 0, serve messages
                time.sleep(0.0005)
                continue
            if origin is None:
                origin = time.monotonic()
            try:
                data = self.session.next_chunk(chunk)
            except StimwaveError as exc:
                # synthesis failed: stop the train, report via status, keep serving
                self.last_error = str(exc)
                self.session.stop()
                data = self.session.next_chunk(chunk)
            try:
                self.sink.write(data)
            except StimwaveError:
                break  # sink contract violation; nothing sensible to stream to
            if self.config.pace:
                target = origin + self.session.position / rate
                delay = target - time.monotonic()
                if delay > 0:
                    time.sleep(delay)

    def _handle_frame(self, conn: _Connection, line: bytes, received_at: int) -> None:
        try:
            obj = decode_line(line)
        except ParameterError as exc:
            conn.send({"id": None, "ok": False, "error": str(exc)})
            return
        rid = obj.get("id")
        if isinstance(rid, (dict, list)):
            rid = None
        try:
            rid, kind = parse_request(obj)
        except ParameterError as exc:
            conn.send({"id": rid, "ok": False, "error": str(exc)})
            return
        if kind not in ("hello", "status") and conn.role != "controller":
            conn.send({"id": rid, "ok": False,
                       "error": "read-only connection: another client holds control"})
            return
        try:
            reply = self._dispatch(kind, obj, received_at, conn)
        except ParameterError as exc:
            reply = {"ok": False, "error": str(exc)}
        reply["id"] = rid
        conn.send(reply)

    def _dispatch(self, kind: str, obj: dict, received_at: int, conn: _Connection) -> dict:
        session = self.session
        applied_at = session.position
        if kind == "hello":
            return {
                "ok": True,
                "server": "stimwave",
                "protocol": PROTOCOL_VERSION,
                "role": conn.role,
                "sample_rate_hz": self.config.sample_rate_hz,
                "chunk_size": self.config.chunk_size,
                "clamp_mode": self.config.clamp_mode,
                "envelope": envelope_to_dict(session.envelope),
                "state": state_to_dict(session.status()),
            }
        if kind == "status":
            return {"ok": True, "state": state_to_dict(session.status()),
                    "last_error": self.last_error}
        if kind == "set_params":
            spec = spec_from_dict(obj["spec"]) if "spec" in obj else None
            shape = spec.shape if spec is not None else session.spec.shape
            params = params_from_dict(obj["params"], shape) if "params" in obj else None
            result = session.apply_update(LiveUpdate(spec=spec, params=params))
            if result.refused:
                return {"ok": False, "error": result.reason,
                        "validation": report_to_dict(result.report)}
            return {
                "ok": True,
                "applied": {"spec": spec_to_dict(result.spec),
                            "params": params_to_dict(result.params)},
                "validation": report_to_dict(result.report),
                "clamped": result.clamped,
                "received_at_sample": received_at,
                "applied_at_sample": applied_at,
                "effective_sample": result.effective_sample,
            }
        if kind == "start":
            at = session.start()
            self._streaming = True
            return {"ok": True, "at_sample": at, "state": state_to_dict(session.status())}
        if kind == "stop":
            silent_from = session.stop()
            return {"ok": True, "silent_from_sample": silent_from,
                    "received_at_sample": received_at, "applied_at_sample": applied_at}
        if kind == "emergency_stop":
            zero_from = session.emergency_stop()
            return {"ok": True, "zero_from_sample": zero_from,
                    "received_at_sample": received_at, "applied_at_sample": applied_at}
        if kind == "rearm":
            session.rearm()
            return {"ok": True, "state": state_to_dict(session.status())}
        raise ParameterError(f"unhandled kind {kind!r}")  # unreachable; parse_request screens


class ControlClient:
    """Blocking line-protocol client for tests, scripts, and demos."""

    def __init__(self, host: str, port: int, timeout_s: float = 5.0):
        self.sock = socket.create_connection((host, port), timeout=timeout_s)
        self._buf = b""
        self._next_id = 1

    def close(self) -> None:
        self.sock.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False

    def _read_reply(self) -> dict:
        while b"\n" not in self._buf:
            data = self.sock.recv(4096)
            if not data:
                raise ConnectionError("server closed the connection")
            self._buf += data
        line, self._buf = self._buf.split(b"\n", 1)
        return decode_line(line)

    def request(self, kind: str, **payload) -> dict:
        """Send one request and block for its reply (replies arrive in order)."""
        rid = self._next_id
        self._next_id += 1
        frame = {"id": rid, "kind": kind, **payload}
        self.sock.sendall(encode_line(frame))
        reply = self._read_reply()
        if reply.get("id") != rid:
            raise ConnectionError(f"reply id {reply.get('id')!r} does not match request {rid}")
        return reply

    def send_raw(self, data: bytes) -> None:
        self.sock.sendall(data)

    def read_raw_reply(self) -> dict:
        return self._read_reply()

    # convenience wrappers
    def hello(self) -> dict:
        return self.request("hello")

    def set_params(self, spec: Optional[dict] = None, params: Optional[dict] = None) -> dict:
        payload = {}
        if spec is not None:
            payload["spec"] = spec
        if params is not None:
            payload["params"] = params
        return self.request("set_params", **payload)

    def start(self) -> dict:
        return self.request("start")

    def stop(self) -> dict:
        return self.request("stop")

    def emergency_stop(self) -> dict:
        return self.request("emergency_stop")

    def rearm(self) -> dict:
        return self.request("rearm")

    def status(self) -> dict:
        return self.request("status")
