import { describe, expect, it } from "vitest";

import { ControlChannel } from "../src/client.js";
import type { Reply } from "../src/protocol.js";
import { transportPair } from "../src/transport.js";
import { StubService } from "./stub-service.js";

function settle(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

function makeChannel(options: { defer?: boolean } = {}) {
  const [clientEnd, serviceEnd] = transportPair({ defer: options.defer ?? false });
  const stub = new StubService(serviceEnd);
  const channel = new ControlChannel(clientEnd);
  return { channel, stub, clientEnd };
}

describe("id correlation", () => {
  it("resolves each request with the reply that echoes its id", async () => {
    const { channel } = makeChannel();
    const hello = await channel.hello();
    const status = await channel.status();
    expect(hello.id).toBe(1);
    expect(status.id).toBe(2);
    expect(hello.protocol).toBe(1);
    expect(status.state?.run_state).toBe("idle");
  });

  it("keeps promises matched to ids when requests overlap", async () => {
    const { channel } = makeChannel({ defer: true });
    const p1 = channel.status();
    const p2 = channel.hello();
    const p3 = channel.status();
    const [r1, r2, r3] = await Promise.all([p1, p2, p3]);
    expect(r1.id).toBe(1);
    expect(r2.id).toBe(2);
    expect(r3.id).toBe(3);
    expect(r2.envelope).toBeDefined();
    expect(r1.envelope).toBeUndefined();
  });

  it("notifies reply listeners with the request kind", async () => {
    const { channel } = makeChannel();
    const seen: string[] = [];
    channel.onReply((_reply, kind) => seen.push(kind));
    await channel.hello();
    await channel.start();
    await channel.stop();
    expect(seen).toEqual(["hello", "start", "stop"]);
  });
});

describe("set_params coalescing", () => {
  const update = (freq: number) => ({
    spec: { shape: "sine" as const, polarity: "biphasic" as const },
    params: { frequency_hz: freq, pulse_width_us: 200, amplitude: 0.5 },
  });

  it("sends immediately when the line is clear", async () => {
    const { channel, stub } = makeChannel();
    channel.pushParams(update(120));
    await settle();
    const sent = stub.received.filter((f) => f.kind === "set_params");
    expect(sent).toHaveLength(1);
    expect((stub.params as { frequency_hz: number }).frequency_hz).toBe(120);
  });

  it("collapses rapid edits into one follow-up request, last value wins", async () => {
    const { channel, stub } = makeChannel({ defer: true });
    channel.pushParams(update(100));  // goes out now
    channel.pushParams(update(110));  // queued
    channel.pushParams(update(125));  // replaces the queued edit
    channel.pushParams(update(140));  // replaces again
    expect(channel.paramsBusy).toBe(true);
    expect(channel.hasQueuedEdit).toBe(true);
    await settle();
    expect(channel.hasQueuedEdit).toBe(false);
    const sent = stub.received.filter((f) => f.kind === "set_params");
    expect(sent).toHaveLength(2);
    expect((sent[0].params as { frequency_hz: number }).frequency_hz).toBe(100);
    expect((sent[1].params as { frequency_hz: number }).frequency_hz).toBe(140);
    expect((stub.params as { frequency_hz: number }).frequency_hz).toBe(140);
    expect(channel.paramsBusy).toBe(false);
  });

  it("every sent update renders a reply (nothing is fire-and-forget)", async () => {
    const { channel, stub } = makeChannel({ defer: true });
    const replies: Reply[] = [];
    channel.onReply((reply, kind) => {
      if (kind === "set_params") replies.push(reply);
    });
    channel.pushParams(update(100));
    channel.pushParams(update(130));
    await settle();
    const sent = stub.received.filter((f) => f.kind === "set_params");
    expect(replies).toHaveLength(sent.length);
    expect(replies.every((r) => r.ok)).toBe(true);
  });

  it("a rejected update still completes and frees the line", async () => {
    const { channel, stub } = makeChannel();
    channel.pushParams(update(1000));  // outside freq_hard
    await settle();
    expect(channel.paramsBusy).toBe(false);
    expect((stub.params as { frequency_hz: number }).frequency_hz).toBe(100);  // unchanged default
    channel.pushParams(update(90));
    await settle();
    expect((stub.params as { frequency_hz: number }).frequency_hz).toBe(90);
  });
});

describe("connection loss", () => {
  it("rejects in-flight requests and refuses new ones", async () => {
    const { channel, clientEnd } = makeChannel({ defer: true });
    const pending = channel.status();
    clientEnd.close();
    await expect(pending).rejects.toThrow(/connection lost/);
    await expect(channel.status()).rejects.toThrow(/connection lost/);
  });

  it("fires onClose callbacks once with the reason", async () => {
    const { channel, clientEnd } = makeChannel();
    const reasons: string[] = [];
    channel.onClose((r) => reasons.push(r));
    clientEnd.close();
    clientEnd.close();
    expect(reasons).toEqual(["closed by client"]);
  });
});
