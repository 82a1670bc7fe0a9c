"""
Live control session
====================

Run the control service in-process with a WAV file as its sink, drive it
over TCP exactly as a remote client would, then prove the central live
guarantee: replaying the same commands at the sample positions the replies
reported reproduces the captured stream bit for bit.

The service applies every command at a render-chunk boundary and parameter
changes at the next pulse onset, so "what happened when" is always a sample
position, never a wall-clock guess.
"""

import os

import numpy as np

import stimwave as sw
from stimwave.service import DEFAULT_PARAMS, DEFAULT_SPEC

RATE = 48_000
CHUNK = 256
OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)
capture_path = os.path.join(OUT, "live_capture.wav")

sink = sw.SinkConfig("file", RATE, encoding=sw.Encoding.FLOAT32,
                     path=capture_path)
config = sw.ServiceConfig(pace=False, sink_config=sink)

def wait_until(client, target):
    while client.status()["state"]["samples_emitted"] < target:
        pass

with sw.ControlService(config) as service:
    host, port = service.address[:2]
    print(f"service on {host}:{port}")
    client = sw.ControlClient(host, port)

    hello = client.hello()
    print(f"connected as {hello['role']}, "
          f"{hello['sample_rate_hz']} Hz, chunk {hello['chunk_size']}")

    started = client.start()
    print(f"started at sample {started['at_sample']}")
    wait_until(client, 8 * CHUNK)

    update = client.set_params(params={"frequency_hz": 160.0,
                                       "pulse_width_us": 120.0,
                                       "amplitude": 0.5})
    print(f"update received at {update['received_at_sample']}, "
          f"applied at {update['applied_at_sample']}, "
          f"effective at pulse onset {update['effective_sample']}")
    wait_until(client, update["applied_at_sample"] + 40 * CHUNK)

    # out-of-envelope updates are refused and change nothing
    refused = client.set_params(params={"frequency_hz": 1000.0,
                                        "pulse_width_us": 120.0,
                                        "amplitude": 0.5})
    print(f"1000 Hz refused: {refused['error']}")

    stop = client.emergency_stop()
    print(f"emergency stop: zeros from sample {stop['zero_from_sample']} "
          f"(latency {stop['zero_from_sample'] - stop['received_at_sample']} "
          f"samples, limit {CHUNK})")
    wait_until(client, stop["zero_from_sample"] + 4 * CHUNK)
    client.close()

# replay the recorded history offline and compare
captured = sw.read_wav(capture_path).samples
session = sw.LiveSession(DEFAULT_SPEC, DEFAULT_PARAMS, RATE)
events = {
    started["at_sample"]: lambda s: s.start(),
    update["applied_at_sample"]: lambda s: s.apply_update(sw.LiveUpdate(
        params=sw.PulseTrainParams(160.0, 120.0, amplitude=0.5))),
    stop["zero_from_sample"]: lambda s: s.emergency_stop(),
}
replayed = np.empty(captured.size)
position = 0
while position < captured.size:
    if position in events:
        events.pop(position)(session)
    n = min(CHUNK, captured.size - position)
    replayed[position:position + n] = session.next_chunk(n)
    position += n

identical = bool(np.array_equal(captured, replayed.astype(np.float32)))
print(f"\ncaptured {captured.size} samples -> {capture_path}")
print(f"offline replay of the same history is sample-identical: {identical}")
