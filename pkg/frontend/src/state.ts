/**
 * UI state store. The one rule that matters: the "active" parameters shown
 * to the user come only from service confirmations (hello/status snapshots
 * and set_params applied payloads). Local slider edits live in `pending`
 * until the service acknowledges them, then pending clears and confirmed
 * updates from the reply, never from the local value.
 */

import type {
  EnvelopeWire, ParamsWire, Reply, RunState, SessionStateWire, SpecWire,
  ValidationWire,
} from "./protocol.js";

export type ConnectionStatus = "disconnected" | "connecting" | "connected" | "stale";

export interface ConfirmedParams {
  spec: SpecWire;
  params: ParamsWire;
}

export interface UiState {
  connection: ConnectionStatus;
  /** Envelope advertised in the hello reply; sliders take bounds from here. */
  envelope: EnvelopeWire | null;
  sampleRateHz: number | null;
  chunkSize: number | null;
  clampMode: boolean;
  role: "controller" | "observer" | null;
  /** Latest full state snapshot the service sent. */
  snapshot: SessionStateWire | null;
  /** Active parameters as confirmed by the service. */
  confirmed: ConfirmedParams | null;
  /** Local edits not yet acknowledged; null when everything shown is confirmed. */
  pending: ConfirmedParams | null;
  /** Validation report from the most recent set_params reply (accept or reject). */
  lastReport: ValidationWire | null;
  lastReportRejected: boolean;
  emergencyLatched: boolean;
  lastError: string | null;
}

function initialState(): UiState {
  return {
    connection: "disconnected",
    envelope: null,
    sampleRateHz: null,
    chunkSize: null,
    clampMode: false,
    role: null,
    snapshot: null,
    confirmed: null,
    pending: null,
    lastReport: null,
    lastReportRejected: false,
    emergencyLatched: false,
    lastError: null,
  };
}

export class UiStore {
  private current: UiState = initialState();
  private listeners: Array<(state: UiState) => void> = [];

  get state(): UiState {
    return this.current;
  }

  subscribe(cb: (state: UiState) => void): () => void {
    this.listeners.push(cb);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== cb);
    };
  }

  private commit(patch: Partial<UiState>): void {
    this.current = { ...this.current, ...patch };
    for (const cb of this.listeners) cb(this.current);
  }

  connecting(): void {
    this.current = initialState();
    this.commit({ connection: "connecting" });
  }

  /** Apply the hello reply: envelope, role, rates, and the initial snapshot. */
  connected(hello: Reply): void {
    const snapshot = hello.state ?? null;
    this.commit({
      connection: "connected",
      envelope: hello.envelope ?? null,
      sampleRateHz: hello.sample_rate_hz ?? null,
      chunkSize: hello.chunk_size ?? null,
      clampMode: hello.clamp_mode ?? false,
      role: hello.role ?? null,
      snapshot,
      confirmed: snapshot ? { spec: snapshot.spec, params: snapshot.params } : null,
      pending: null,
      emergencyLatched: snapshot?.run_state === "stopped_emergency",
      lastError: null,
    });
  }

  /** Record a local edit awaiting acknowledgment. */
  editPending(spec: SpecWire, params: ParamsWire): void {
    this.commit({ pending: { spec, params } });
  }

  /** Fold a set_params reply in: applied values become the confirmed display. */
  paramsReply(reply: Reply): void {
    if (reply.ok && reply.applied) {
      this.commit({
        confirmed: { spec: reply.applied.spec, params: reply.applied.params },
        pending: null,
        lastReport: reply.validation ?? null,
        lastReportRejected: false,
        lastError: null,
      });
    } else {
      // Rejected: confirmed display keeps the old service values.
      this.commit({
        pending: null,
        lastReport: reply.validation ?? null,
        lastReportRejected: true,
        lastError: reply.error ?? "update rejected",
      });
    }
  }

  /** Fold any reply that carries a state snapshot (status/start/rearm/hello). */
  stateSnapshot(state: SessionStateWire): void {
    this.commit({
      snapshot: state,
      confirmed: { spec: state.spec, params: state.params },
      emergencyLatched: state.run_state === "stopped_emergency",
    });
  }

  emergencyStopped(): void {
    const snapshot = this.current.snapshot;
    this.commit({
      emergencyLatched: true,
      snapshot: snapshot ? { ...snapshot, run_state: "stopped_emergency" as RunState } : snapshot,
    });
  }

  requestFailed(message: string): void {
    this.commit({ lastError: message });
  }

  disconnected(reason: string): void {
    // Keep the last confirmed values visible but mark them stale and
    // unusable; controls grey out until a fresh connection succeeds.
    this.commit({
      connection: this.current.connection === "connecting" ? "disconnected" : "stale",
      pending: null,
      lastError: reason,
    });
  }

  get runState(): RunState | null {
    return this.current.snapshot?.run_state ?? null;
  }

  /** Controls are usable only on a live controller connection, not latched. */
  get controlsEnabled(): boolean {
    return (
      this.current.connection === "connected" &&
      this.current.role === "controller" &&
      !this.current.emergencyLatched
    );
  }
}
