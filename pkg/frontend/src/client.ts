/**
 * Request/reply channel over a line transport.
 *
 * Requests carry incrementing ids; the service answers in order, one reply
 * per request, echoing the id. Parameter updates go through pushParams(),
 * which keeps at most one set_params in flight: edits made while a request
 * is outstanding coalesce, and only the latest coalesced value is sent when
 * the reply lands. Nothing is fire-and-forget; every sent request resolves
 * a promise and feeds the reply listeners.
 */

import {
  decodeReply, encodeRequest,
  type ParamsWire, type Reply, type Request, type RequestKind, type SpecWire,
} from "./protocol.js";
import type { Transport } from "./transport.js";

interface PendingRequest {
  id: number;
  kind: RequestKind;
  resolve: (reply: Reply) => void;
  reject: (err: Error) => void;
}

export interface ParamsUpdate {
  spec: SpecWire;
  params: ParamsWire;
}

export class ControlChannel {
  private nextId = 1;
  private pending: PendingRequest[] = [];
  private paramsInFlight = false;
  private queuedUpdate: ParamsUpdate | null = null;
  private replyCbs: Array<(reply: Reply, kind: RequestKind) => void> = [];
  private closeCbs: Array<(reason: string) => void> = [];
  private closedReason: string | null = null;

  constructor(private transport: Transport) {
    transport.onLine((line) => this.handleLine(line));
    transport.onClose((reason) => this.handleClose(reason));
  }

  /** Observe every reply (after its promise resolves), tagged with its request kind. */
  onReply(cb: (reply: Reply, kind: RequestKind) => void): void {
    this.replyCbs.push(cb);
  }

  onClose(cb: (reason: string) => void): void {
    this.closeCbs.push(cb);
  }

  request(kind: RequestKind, fields: Partial<Request> = {}): Promise<Reply> {
    if (this.closedReason !== null) {
      return Promise.reject(new Error(this.closedReason));
    }
    const id = this.nextId++;
    const req: Request = { id, kind, ...fields };
    return new Promise((resolve, reject) => {
      this.pending.push({ id, kind, resolve, reject });
      try {
        this.transport.send(encodeRequest(req));
      } catch (err) {
        this.pending = this.pending.filter((p) => p.id !== id);
        reject(err as Error);
      }
    });
  }

  hello(): Promise<Reply> {
    return this.request("hello");
  }

  status(): Promise<Reply> {
    return this.request("status");
  }

  start(): Promise<Reply> {
    return this.request("start");
  }

  stop(): Promise<Reply> {
    return this.request("stop");
  }

  emergencyStop(): Promise<Reply> {
    return this.request("emergency_stop");
  }

  rearm(): Promise<Reply> {
    return this.request("rearm");
  }

  /**
   * Submit a parameter edit. Sends immediately when the line is clear;
   * otherwise replaces any queued edit so rapid slider motion collapses
   * into one request once the in-flight reply arrives.
   */
  pushParams(update: ParamsUpdate): void {
    if (this.paramsInFlight) {
      this.queuedUpdate = update;
      return;
    }
    this.sendParams(update);
  }

  /** True if a set_params is outstanding or an edit is queued behind one. */
  get paramsBusy(): boolean {
    return this.paramsInFlight || this.queuedUpdate !== null;
  }

  /** True if a coalesced edit is waiting for the in-flight reply to land. */
  get hasQueuedEdit(): boolean {
    return this.queuedUpdate !== null;
  }

  private sendParams(update: ParamsUpdate): void {
    this.paramsInFlight = true;
    this.request("set_params", { spec: update.spec, params: update.params })
      .catch(() => undefined)  // reply listeners see the outcome; errors also surface via onClose
      .then(() => {
        this.paramsInFlight = false;
        const queued = this.queuedUpdate;
        this.queuedUpdate = null;
        if (queued !== null && this.closedReason === null) {
          this.sendParams(queued);
        }
      });
  }

  private handleLine(line: string): void {
    let reply: Reply;
    try {
      reply = decodeReply(line);
    } catch {
      return;  // not a reply frame; nothing to correlate
    }
    // Replies arrive in request order; unsolicited id-null errors (e.g. for
    // a frame the service could not parse) match no pending entry.
    const index = this.pending.findIndex((p) => p.id === reply.id);
    if (index < 0) return;
    const [entry] = this.pending.splice(index, 1);
    entry.resolve(reply);
    for (const cb of this.replyCbs) cb(reply, entry.kind);
  }

  private handleClose(reason: string): void {
    if (this.closedReason !== null) return;
    this.closedReason = `connection lost: ${reason}`;
    const err = new Error(this.closedReason);
    for (const entry of this.pending.splice(0)) entry.reject(err);
    this.queuedUpdate = null;
    this.paramsInFlight = false;
    for (const cb of this.closeCbs) cb(reason);
  }

  close(): void {
    this.transport.close();
  }
}
