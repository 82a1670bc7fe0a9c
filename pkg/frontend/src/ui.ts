/**
 * Control panel: waveform selector, parameter sliders bounded by the
 * envelope the service advertises, start/stop, a large emergency stop
 * (mouse or space bar), live validation reports, and a preview scope
 * drawn from service-confirmed parameters only.
 */

import { ControlChannel } from "./client.js";
import {
  isRussianParams,
  type ParamsWire, type PulseParamsWire, type Reply, type RequestKind,
  type RussianParamsWire, type Shape, type SpecWire,
} from "./protocol.js";
import { previewWave, PreviewError, type PreviewWave } from "./preview.js";
import { drawScope } from "./scope.js";
import { UiStore, type UiState } from "./state.js";
import type { Transport } from "./transport.js";

const PANEL_HTML = `
<div class="panel">
  <div class="row connect-row">
    <label>service <input id="address" type="text" spellcheck="false"></label>
    <button id="connect-btn">connect</button>
    <span id="conn-status" class="status-pill">disconnected</span>
    <span id="role-badge"></span>
  </div>

  <div class="row status-row">
    <span>state <b id="run-state">&mdash;</b></span>
    <span>samples <b id="samples">0</b></span>
    <span>rate <b id="rate">&mdash;</b></span>
    <span id="error-line" class="error"></span>
  </div>

  <div class="columns">
    <div class="controls">
      <div class="row">
        <label>waveform
          <select id="shape">
            <option value="sine">sine</option>
            <option value="triangle">triangle</option>
            <option value="saw">saw</option>
            <option value="square" selected>square</option>
            <option value="russian">russian</option>
          </select>
        </label>
        <label id="polarity-wrap">polarity
          <select id="polarity">
            <option value="monophasic">monophasic</option>
            <option value="biphasic" selected>biphasic</option>
          </select>
        </label>
      </div>

      <div id="pulse-controls">
        <div class="slider-row">
          <label for="freq">frequency</label>
          <input id="freq" type="range" min="1" max="500" step="1" value="100">
          <span class="value"><span id="freq-out">100</span> Hz</span>
        </div>
        <div class="slider-row">
          <label for="width">pulse width</label>
          <input id="width" type="range" min="30" max="800" step="5" value="200">
          <span class="value"><span id="width-out">200</span> &micro;s</span>
        </div>
        <div class="slider-row">
          <label for="gap">interphase gap</label>
          <input id="gap" type="range" min="0" max="200" step="10" value="0">
          <span class="value"><span id="gap-out">0</span> &micro;s</span>
        </div>
      </div>

      <div id="russian-controls" hidden>
        <div class="slider-row">
          <label for="carrier">carrier</label>
          <input id="carrier" type="range" min="1000" max="10000" step="100" value="2500">
          <span class="value"><span id="carrier-out">2500</span> Hz</span>
        </div>
        <div class="slider-row">
          <label for="burst-ms">burst</label>
          <input id="burst-ms" type="range" min="1" max="50" step="0.5" value="10">
          <span class="value"><span id="burst-out">10</span> ms</span>
        </div>
        <div class="slider-row">
          <label for="interburst-ms">rest</label>
          <input id="interburst-ms" type="range" min="0.5" max="50" step="0.5" value="10">
          <span class="value"><span id="interburst-out">10</span> ms</span>
        </div>
        <div class="slider-row">
          <span class="note">burst rate <span id="burst-rate-out">50</span> Hz</span>
        </div>
      </div>

      <div class="slider-row">
        <label for="amplitude">amplitude</label>
        <input id="amplitude" type="range" min="0" max="1" step="0.01" value="0.5">
        <span class="value"><span id="amplitude-out">0.50</span> FS</span>
      </div>
      <div class="slider-row">
        <label for="gain">gain</label>
        <input id="gain" type="range" min="-12" max="12" step="0.5" value="0">
        <span class="value"><span id="gain-out">0.0</span> dB</span>
      </div>

      <div class="row run-row">
        <button id="start-btn">start</button>
        <button id="stop-btn">stop</button>
        <span id="pending-badge" class="pending-badge" hidden>pending&hellip;</span>
      </div>

      <div id="active-params" class="active-params">no confirmed parameters yet</div>

      <div id="report" class="report"></div>
    </div>

    <div class="scope-pane">
      <canvas id="preview" width="640" height="320"></canvas>
      <div class="scope-caption">preview of the service-confirmed waveform (two periods)</div>
    </div>
  </div>

  <div class="estop-row">
    <button id="estop-btn" class="estop" title="space bar also triggers">EMERGENCY STOP</button>
    <button id="rearm-btn">re-arm</button>
  </div>
</div>
`;

export interface UiElements {
  root: HTMLElement;
  address: HTMLInputElement;
  connectBtn: HTMLButtonElement;
  connStatus: HTMLElement;
  roleBadge: HTMLElement;
  runState: HTMLElement;
  samples: HTMLElement;
  rate: HTMLElement;
  errorLine: HTMLElement;
  shape: HTMLSelectElement;
  polarityWrap: HTMLElement;
  polarity: HTMLSelectElement;
  pulseControls: HTMLElement;
  russianControls: HTMLElement;
  freq: HTMLInputElement;
  freqOut: HTMLElement;
  width: HTMLInputElement;
  widthOut: HTMLElement;
  gap: HTMLInputElement;
  gapOut: HTMLElement;
  carrier: HTMLInputElement;
  carrierOut: HTMLElement;
  burstMs: HTMLInputElement;
  burstOut: HTMLElement;
  interburstMs: HTMLInputElement;
  interburstOut: HTMLElement;
  burstRateOut: HTMLElement;
  amplitude: HTMLInputElement;
  amplitudeOut: HTMLElement;
  gain: HTMLInputElement;
  gainOut: HTMLElement;
  startBtn: HTMLButtonElement;
  stopBtn: HTMLButtonElement;
  pendingBadge: HTMLElement;
  activeParams: HTMLElement;
  report: HTMLElement;
  preview: HTMLCanvasElement;
  estopBtn: HTMLButtonElement;
  rearmBtn: HTMLButtonElement;
}

export function buildUi(root: HTMLElement): UiElements {
  root.innerHTML = PANEL_HTML;
  const get = <T extends HTMLElement>(id: string): T => {
    const el = root.querySelector<T>(`#${id}`);
    if (!el) throw new Error(`ui template is missing #${id}`);
    return el;
  };
  return {
    root,
    address: get<HTMLInputElement>("address"),
    connectBtn: get<HTMLButtonElement>("connect-btn"),
    connStatus: get("conn-status"),
    roleBadge: get("role-badge"),
    runState: get("run-state"),
    samples: get("samples"),
    rate: get("rate"),
    errorLine: get("error-line"),
    shape: get<HTMLSelectElement>("shape"),
    polarityWrap: get("polarity-wrap"),
    polarity: get<HTMLSelectElement>("polarity"),
    pulseControls: get("pulse-controls"),
    russianControls: get("russian-controls"),
    freq: get<HTMLInputElement>("freq"),
    freqOut: get("freq-out"),
    width: get<HTMLInputElement>("width"),
    widthOut: get("width-out"),
    gap: get<HTMLInputElement>("gap"),
    gapOut: get("gap-out"),
    carrier: get<HTMLInputElement>("carrier"),
    carrierOut: get("carrier-out"),
    burstMs: get<HTMLInputElement>("burst-ms"),
    burstOut: get("burst-out"),
    interburstMs: get<HTMLInputElement>("interburst-ms"),
    interburstOut: get("interburst-out"),
    burstRateOut: get("burst-rate-out"),
    amplitude: get<HTMLInputElement>("amplitude"),
    amplitudeOut: get("amplitude-out"),
    gain: get<HTMLInputElement>("gain"),
    gainOut: get("gain-out"),
    startBtn: get<HTMLButtonElement>("start-btn"),
    stopBtn: get<HTMLButtonElement>("stop-btn"),
    pendingBadge: get("pending-badge"),
    activeParams: get("active-params"),
    report: get("report"),
    preview: get<HTMLCanvasElement>("preview"),
    estopBtn: get<HTMLButtonElement>("estop-btn"),
    rearmBtn: get<HTMLButtonElement>("rearm-btn"),
  };
}

export interface ControllerOptions {
  /** Opens a transport for the address in the address box. */
  connect: (address: string) => Promise<Transport>;
  /** Status poll interval; 0 disables polling (tests drive status manually). */
  pollMs?: number;
  defaultAddress?: string;
}

function formatParams(spec: SpecWire, params: ParamsWire): string {
  if (isRussianParams(params)) {
    const p = params as Required<RussianParamsWire>;
    return `russian  carrier ${p.carrier_hz} Hz, burst ${p.burst_ms} ms / rest ${p.interburst_ms} ms, `
      + `amplitude ${p.amplitude}, gain ${p.gain_db} dB`;
  }
  const p = params as Required<PulseParamsWire>;
  const gap = spec.interphase_gap_us ? `, gap ${spec.interphase_gap_us} µs` : "";
  return `${spec.shape} ${spec.polarity ?? "monophasic"}${gap}  ${p.frequency_hz} Hz, `
    + `${p.pulse_width_us} µs, amplitude ${p.amplitude}, gain ${p.gain_db} dB`;
}

export class UiController {
  readonly store = new UiStore();
  channel: ControlChannel | null = null;
  /** Inputs of the last drawn preview; equals the confirmed snapshot after ack. */
  lastPreviewInputs: { spec: SpecWire; params: ParamsWire; sampleRateHz: number } | null = null;

  private pollTimer: ReturnType<typeof setInterval> | null = null;
  private lastDrawnKey = "";

  constructor(private el: UiElements, private opts: ControllerOptions) {
    el.address.value = opts.defaultAddress ?? "ws://127.0.0.1:7610";
    this.bindEvents();
    this.store.subscribe((state) => this.render(state));
    this.render(this.store.state);
  }

  // -- connection lifecycle -------------------------------------------------

  async connect(): Promise<void> {
    this.disconnect("reconnecting");
    this.store.connecting();
    let transport: Transport;
    try {
      transport = await this.opts.connect(this.el.address.value.trim());
    } catch (err) {
      this.store.disconnected((err as Error).message);
      return;
    }
    const channel = new ControlChannel(transport);
    this.channel = channel;
    channel.onReply((reply, kind) => this.routeReply(reply, kind));
    channel.onClose((reason) => {
      if (this.channel === channel) this.store.disconnected(reason);
    });
    try {
      const hello = await channel.hello();
      if (!hello.ok) throw new Error(hello.error ?? "hello failed");
      this.store.connected(hello);
      this.applyEnvelopeBounds();
      this.syncControlsFromConfirmed(true);
    } catch (err) {
      this.store.disconnected((err as Error).message);
      return;
    }
    const pollMs = this.opts.pollMs ?? 1000;
    if (pollMs > 0) {
      this.pollTimer = setInterval(() => {
        if (this.store.state.connection === "connected") {
          this.channel?.status().catch(() => undefined);
        }
      }, pollMs);
    }
  }

  disconnect(reason: string): void {
    if (this.pollTimer !== null) {
      clearInterval(this.pollTimer);
      this.pollTimer = null;
    }
    if (this.channel) {
      const old = this.channel;
      this.channel = null;
      old.close();
    }
    void reason;
  }

  private routeReply(reply: Reply, kind: RequestKind): void {
    switch (kind) {
      case "set_params":
        this.store.paramsReply(reply);
        if (this.channel?.hasQueuedEdit) {
          // A coalesced edit is already queued behind this reply; the
          // controls still show it, so it stays pending until its own ack.
          const { spec, params } = this.gatherControls();
          this.store.editPending(spec, params);
        } else if (reply.ok) {
          this.syncControlsFromConfirmed(false);
        }
        return;
      case "emergency_stop":
        if (reply.ok) this.store.emergencyStopped();
        else this.store.requestFailed(reply.error ?? "emergency stop refused");
        return;
      case "stop":
        if (reply.ok) this.channel?.status().catch(() => undefined);
        else this.store.requestFailed(reply.error ?? "stop refused");
        return;
      default:
        if (reply.ok && reply.state) this.store.stateSnapshot(reply.state);
        else if (!reply.ok) this.store.requestFailed(reply.error ?? `${kind} refused`);
    }
  }

  // -- envelope-driven slider bounds ----------------------------------------

  private applyEnvelopeBounds(): void {
    const envelope = this.store.state.envelope;
    if (!envelope) return;
    const { el } = this;
    el.freq.min = String(envelope.freq_hard[0]);
    el.freq.max = String(envelope.freq_hard[1]);
    el.freq.title = `permitted ${envelope.freq_hard[0]}–${envelope.freq_hard[1]} Hz, `
      + `typical ${envelope.freq_typical[0]}–${envelope.freq_typical[1]} Hz`;
    el.width.min = String(envelope.width_hard[0]);
    el.width.max = String(envelope.width_hard[1]);
    el.width.title = `permitted ${envelope.width_hard[0]}–${envelope.width_hard[1]} µs`;
    // Burst sliders are bounded so the derived burst rate stays inside its
    // envelope: rate = 1000/(burst+rest), so the cycle length is what matters.
    const [rateLo, rateHi] = envelope.russian_burst_rate_hard;
    el.burstRateOut.title = `permitted ${rateLo}–${rateHi} Hz`;
  }

  // -- control handling -------------------------------------------------------

  private bindEvents(): void {
    const { el } = this;
    el.connectBtn.addEventListener("click", () => void this.connect());
    el.shape.addEventListener("change", () => {
      this.updateSectionVisibility();
      this.submitControls();
    });
    el.polarity.addEventListener("change", () => this.submitControls());
    for (const input of [el.freq, el.width, el.gap, el.carrier, el.burstMs,
                         el.interburstMs, el.amplitude, el.gain]) {
      input.addEventListener("input", () => this.submitControls());
    }
    el.startBtn.addEventListener("click", () => void this.channel?.start().catch(() => undefined));
    el.stopBtn.addEventListener("click", () => void this.channel?.stop().catch(() => undefined));
    el.estopBtn.addEventListener("click", () => this.triggerEmergencyStop());
    el.rearmBtn.addEventListener("click", () => void this.channel?.rearm().catch(() => undefined));
    el.root.ownerDocument.addEventListener("keydown", (ev: KeyboardEvent) => {
      if (ev.code !== "Space" && ev.key !== " ") return;
      const target = ev.target as HTMLElement | null;
      if (target && (target.tagName === "INPUT" && (target as HTMLInputElement).type === "text")) return;
      ev.preventDefault();
      this.triggerEmergencyStop();
    });
  }

  /** Emergency stop fires on any live connection, even mid-edit. */
  triggerEmergencyStop(): void {
    if (this.store.state.connection !== "connected") return;
    if (this.store.state.emergencyLatched) return;
    void this.channel?.emergencyStop().catch(() => undefined);
  }

  private updateSectionVisibility(): void {
    const russian = this.el.shape.value === "russian";
    this.el.pulseControls.hidden = russian;
    this.el.polarityWrap.hidden = russian;
    this.el.russianControls.hidden = !russian;
  }

  private updateLocalReadouts(): void {
    const { el } = this;
    el.freqOut.textContent = el.freq.value;
    el.widthOut.textContent = el.width.value;
    el.gapOut.textContent = el.gap.value;
    el.carrierOut.textContent = el.carrier.value;
    el.burstOut.textContent = el.burstMs.value;
    el.interburstOut.textContent = el.interburstMs.value;
    el.amplitudeOut.textContent = Number(el.amplitude.value).toFixed(2);
    el.gainOut.textContent = Number(el.gain.value).toFixed(1);
    const cycleMs = Number(el.burstMs.value) + Number(el.interburstMs.value);
    el.burstRateOut.textContent = cycleMs > 0 ? (1000 / cycleMs).toFixed(1) : "—";
  }

  /** Read the control positions into a wire-shaped update. */
  gatherControls(): { spec: SpecWire; params: ParamsWire } {
    const { el } = this;
    if (el.shape.value === "russian") {
      return {
        spec: { shape: "russian" },
        params: {
          carrier_hz: Number(el.carrier.value),
          burst_ms: Number(el.burstMs.value),
          interburst_ms: Number(el.interburstMs.value),
          amplitude: Number(el.amplitude.value),
          gain_db: Number(el.gain.value),
        },
      };
    }
    const spec: SpecWire = {
      shape: el.shape.value as Shape,
      polarity: el.polarity.value as "monophasic" | "biphasic",
    };
    const gap = Number(el.gap.value);
    if (gap > 0) spec.interphase_gap_us = gap;
    return {
      spec,
      params: {
        frequency_hz: Number(el.freq.value),
        pulse_width_us: Number(el.width.value),
        amplitude: Number(el.amplitude.value),
        gain_db: Number(el.gain.value),
      },
    };
  }

  /** One control edit: record it as pending, send (or coalesce) the update. */
  private submitControls(): void {
    this.updateLocalReadouts();
    if (!this.channel || !this.store.controlsEnabled) return;
    const { spec, params } = this.gatherControls();
    this.store.editPending(spec, params);
    this.channel.pushParams({ spec, params });
  }

  /** Move sliders to the confirmed values (skipped while an edit is pending). */
  private syncControlsFromConfirmed(force: boolean): void {
    const confirmed = this.store.state.confirmed;
    if (!confirmed) return;
    if (!force && this.store.state.pending !== null) return;
    const { el } = this;
    const { spec, params } = confirmed;
    el.shape.value = spec.shape;
    if (isRussianParams(params)) {
      el.carrier.value = String(params.carrier_hz ?? 2500);
      el.burstMs.value = String(params.burst_ms ?? 10);
      el.interburstMs.value = String(params.interburst_ms ?? 10);
    } else {
      el.polarity.value = spec.polarity ?? "monophasic";
      el.freq.value = String(params.frequency_hz);
      el.width.value = String(params.pulse_width_us);
      el.gap.value = String(spec.interphase_gap_us ?? 0);
    }
    el.amplitude.value = String(params.amplitude);
    el.gain.value = String(params.gain_db ?? 0);
    this.updateSectionVisibility();
    this.updateLocalReadouts();
  }

  // -- rendering ----------------------------------------------------------------

  private render(state: UiState): void {
    const { el } = this;
    el.connStatus.textContent = state.connection;
    el.connStatus.className = `status-pill status-${state.connection}`;
    el.roleBadge.textContent = state.role ? `(${state.role})` : "";
    el.runState.textContent = state.snapshot?.run_state ?? "—";
    el.samples.textContent = String(state.snapshot?.samples_emitted ?? 0);
    el.rate.textContent = state.sampleRateHz ? `${state.sampleRateHz} Hz` : "—";
    el.errorLine.textContent = state.lastError ?? "";

    const live = state.connection === "connected";
    const controls = this.store.controlsEnabled;
    for (const input of [el.shape, el.polarity, el.freq, el.width, el.gap,
                         el.carrier, el.burstMs, el.interburstMs,
                         el.amplitude, el.gain]) {
      input.disabled = !controls;
    }
    el.startBtn.disabled = !controls;
    el.stopBtn.disabled = !controls;
    // The emergency stop stays armed on any live controller connection and
    // goes quiet only once already latched (then re-arm is the way back).
    el.estopBtn.disabled = !live || state.role !== "controller" || state.emergencyLatched;
    el.rearmBtn.disabled = !live || state.role !== "controller" || !state.emergencyLatched;

    el.pendingBadge.hidden = state.pending === null;

    if (state.confirmed) {
      const stale = state.connection === "stale" ? "  [stale]" : "";
      el.activeParams.textContent =
        `active: ${formatParams(state.confirmed.spec, state.confirmed.params)}${stale}`;
    } else {
      el.activeParams.textContent = "no confirmed parameters yet";
    }

    this.renderReport(state);
    this.redrawPreview(state);
  }

  private renderReport(state: UiState): void {
    const report = state.lastReport;
    const el = this.el.report;
    if (!report) {
      el.textContent = "";
      el.className = "report";
      return;
    }
    const cls = report.verdict === "reject" ? "report reject"
      : report.verdict === "pass_with_warnings" ? "report warn" : "report";
    const lines = [`verdict: ${report.verdict}${state.lastReportRejected ? " (parameters unchanged)" : ""}`];
    for (const f of report.findings) {
      lines.push(`[${f.severity}] ${f.parameter}: ${f.message}`);
    }
    el.textContent = lines.join("\n");
    el.className = cls;
  }

  private redrawPreview(state: UiState): void {
    if (!state.confirmed || !state.sampleRateHz) return;
    const key = JSON.stringify([state.confirmed, state.sampleRateHz]);
    if (key === this.lastDrawnKey) return;
    this.lastDrawnKey = key;
    const { spec, params } = state.confirmed;
    let wave: PreviewWave;
    try {
      wave = previewWave(spec, params, state.sampleRateHz, 2);
    } catch (err) {
      if (err instanceof PreviewError) {
        this.store.requestFailed(`preview: ${err.message}`);
        return;
      }
      throw err;
    }
    this.lastPreviewInputs = { spec, params, sampleRateHz: state.sampleRateHz };
    drawScope(this.el.preview, wave);
  }
}
