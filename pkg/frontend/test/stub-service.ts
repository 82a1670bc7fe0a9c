/**
 * In-process stand-in for the control service, speaking the same wire
 * protocol over a test transport. Reply shapes match the real service:
 * every reply echoes the request id, set_params carries applied values
 * plus the validation report and sample positions, and emergency stop
 * latches until rearm.
 */

import type {
  EnvelopeWire, FindingWire, ParamsWire, PulseParamsWire, RunState,
  RussianParamsWire, SessionStateWire, SpecWire, ValidationWire,
} from "../src/protocol.js";
import {
  PROTOCOL_VERSION, withPulseDefaults, withRussianDefaults, withSpecDefaults,
} from "../src/protocol.js";
import type { Transport } from "../src/transport.js";

export const DEFAULT_ENVELOPE: EnvelopeWire = {
  freq_hard: [1.0, 500.0],
  freq_typical: [1.0, 150.0],
  width_hard: [30.0, 800.0],
  max_continuous_s: 300.0,
  russian_burst_rate_hard: [1.0, 150.0],
};

function validateAgainst(envelope: EnvelopeWire, spec: SpecWire, params: ParamsWire): ValidationWire {
  const findings: FindingWire[] = [];
  if (spec.shape === "russian") {
    const p = withRussianDefaults(params as RussianParamsWire);
    const rate = 1000.0 / (p.burst_ms + p.interburst_ms);
    const [lo, hi] = envelope.russian_burst_rate_hard;
    if (!(lo <= rate && rate <= hi)) {
      findings.push({
        parameter: "burst_rate_hz", bound: [lo, hi], severity: "hard",
        message: `burst rate ${rate} Hz outside permitted [${lo}, ${hi}] Hz`,
      });
    }
  } else {
    const p = withPulseDefaults(params as PulseParamsWire);
    const [lo, hi] = envelope.freq_hard;
    if (!(lo <= p.frequency_hz && p.frequency_hz <= hi)) {
      findings.push({
        parameter: "frequency_hz", bound: [lo, hi], severity: "hard",
        message: `frequency ${p.frequency_hz} Hz outside permitted [${lo}, ${hi}] Hz`,
      });
    } else {
      const [tlo, thi] = envelope.freq_typical;
      if (!(tlo <= p.frequency_hz && p.frequency_hz <= thi)) {
        findings.push({
          parameter: "frequency_hz", bound: [tlo, thi], severity: "warning",
          message: `frequency ${p.frequency_hz} Hz outside typical [${tlo}, ${thi}] Hz`,
        });
      }
    }
    const [wlo, whi] = envelope.width_hard;
    if (!(wlo <= p.pulse_width_us && p.pulse_width_us <= whi)) {
      findings.push({
        parameter: "pulse_width_us", bound: [wlo, whi], severity: "hard",
        message: `pulse width ${p.pulse_width_us} us outside permitted [${wlo}, ${whi}] us`,
      });
    }
  }
  const verdict = findings.some((f) => f.severity === "hard")
    ? "reject"
    : findings.length > 0 ? "pass_with_warnings" : "pass";
  return { verdict, findings };
}

export interface StubOptions {
  envelope?: EnvelopeWire;
  sampleRateHz?: number;
  chunkSize?: number;
  clampMode?: boolean;
  role?: "controller" | "observer";
}

export class StubService {
  envelope: EnvelopeWire;
  sampleRateHz: number;
  chunkSize: number;
  clampMode: boolean;
  role: "controller" | "observer";

  runState: RunState = "idle";
  spec: SpecWire = { shape: "square", polarity: "biphasic" };
  params: ParamsWire = { frequency_hz: 100.0, pulse_width_us: 200.0, amplitude: 0.5, gain_db: 0.0 };
  samplesEmitted = 0;
  lastValidation: ValidationWire | null = { verdict: "pass", findings: [] };
  lastError: string | null = null;

  /** Every request the stub saw, in arrival order. */
  received: Array<Record<string, unknown>> = [];

  constructor(private transport: Transport, options: StubOptions = {}) {
    this.envelope = options.envelope ?? DEFAULT_ENVELOPE;
    this.sampleRateHz = options.sampleRateHz ?? 48000;
    this.chunkSize = options.chunkSize ?? 256;
    this.clampMode = options.clampMode ?? false;
    this.role = options.role ?? "controller";
    transport.onLine((line) => this.handle(line));
  }

  /** Simulate the render loop advancing while running. */
  tick(samples: number): void {
    if (this.runState === "running") this.samplesEmitted += samples;
  }

  get latched(): boolean {
    return this.runState === "stopped_emergency";
  }

  private stateDict(): SessionStateWire {
    return {
      run_state: this.runState,
      spec: { ...withSpecDefaults(this.spec) },
      params: { ...this.params },
      sample_rate_hz: this.sampleRateHz,
      samples_emitted: this.samplesEmitted,
      uptime_s: this.samplesEmitted / this.sampleRateHz,
      last_validation: this.lastValidation,
      envelope: this.envelope,
    };
  }

  private reply(obj: Record<string, unknown>): void {
    this.transport.send(JSON.stringify(obj) + "\n");
  }

  private handle(line: string): void {
    let frame: Record<string, unknown>;
    try {
      frame = JSON.parse(line);
    } catch (err) {
      this.reply({ id: null, ok: false, error: `frame is not valid JSON: ${(err as Error).message}` });
      return;
    }
    this.received.push(frame);
    const id = "id" in frame ? (frame.id as number | string) : null;
    if (id === null) {
      this.reply({ id: null, ok: false, error: "request is missing 'id'" });
      return;
    }
    const kind = frame.kind;
    switch (kind) {
      case "hello":
        this.reply({
          ok: true, server: "stimwave", protocol: PROTOCOL_VERSION, role: this.role,
          sample_rate_hz: this.sampleRateHz, chunk_size: this.chunkSize,
          clamp_mode: this.clampMode, envelope: this.envelope, state: this.stateDict(), id,
        });
        return;
      case "status":
        this.reply({ ok: true, state: this.stateDict(), last_error: this.lastError, id });
        return;
      case "set_params":
        this.setParams(id, frame);
        return;
      case "start":
        if (this.role === "observer") {
          this.reply({ id, ok: false, error: "read-only connection: another client holds control" });
          return;
        }
        if (this.latched) {
          this.reply({ ok: false, error: "emergency stop latched; rearm first", id });
          return;
        }
        this.runState = "running";
        this.reply({ ok: true, at_sample: this.samplesEmitted, state: this.stateDict(), id });
        return;
      case "stop":
        if (this.role === "observer") {
          this.reply({ id, ok: false, error: "read-only connection: another client holds control" });
          return;
        }
        if (this.runState === "running") this.runState = "idle";
        this.reply({
          ok: true, silent_from_sample: this.samplesEmitted,
          received_at_sample: this.samplesEmitted, applied_at_sample: this.samplesEmitted, id,
        });
        return;
      case "emergency_stop":
        if (this.role === "observer") {
          this.reply({ id, ok: false, error: "read-only connection: another client holds control" });
          return;
        }
        this.runState = "stopped_emergency";
        this.reply({
          ok: true, zero_from_sample: this.samplesEmitted,
          received_at_sample: this.samplesEmitted, applied_at_sample: this.samplesEmitted, id,
        });
        return;
      case "rearm":
        if (this.role === "observer") {
          this.reply({ id, ok: false, error: "read-only connection: another client holds control" });
          return;
        }
        if (this.latched) this.runState = "idle";
        this.reply({ ok: true, state: this.stateDict(), id });
        return;
      default:
        this.reply({
          id, ok: false,
          error: `unknown kind '${String(kind)}' (expected one of hello, set_params, start, stop, emergency_stop, rearm, status)`,
        });
    }
  }

  private setParams(id: number | string, frame: Record<string, unknown>): void {
    if (this.role === "observer") {
      this.reply({ id, ok: false, error: "read-only connection: another client holds control" });
      return;
    }
    if (this.latched) {
      this.reply({ ok: false, error: "emergency stop latched; rearm first", id });
      return;
    }
    const spec = (frame.spec as SpecWire | undefined) ?? this.spec;
    const raw = frame.params as ParamsWire | undefined;
    if (raw === undefined) {
      this.reply({ ok: false, error: "params is required", id });
      return;
    }
    let params: ParamsWire = spec.shape === "russian"
      ? withRussianDefaults(raw as RussianParamsWire)
      : withPulseDefaults(raw as PulseParamsWire);
    let validation = validateAgainst(this.envelope, spec, params);
    let clamped = false;
    if (validation.verdict === "reject") {
      if (!this.clampMode) {
        this.lastValidation = validation;
        this.reply({ ok: false, error: "rejected by safety validation", validation, id });
        return;
      }
      params = this.clampParams(spec, params);
      validation = validateAgainst(this.envelope, spec, params);
      clamped = true;
    }
    this.spec = withSpecDefaults(spec);
    this.params = params;
    this.lastValidation = validation;
    const at = this.samplesEmitted;
    this.reply({
      ok: true, applied: { spec: { ...this.spec }, params: { ...params } },
      validation, clamped,
      received_at_sample: at, applied_at_sample: at, effective_sample: at, id,
    });
  }

  private clampParams(spec: SpecWire, params: ParamsWire): ParamsWire {
    const clip = (v: number, [lo, hi]: [number, number]) => Math.min(hi, Math.max(lo, v));
    if (spec.shape === "russian") {
      const p = withRussianDefaults(params as RussianParamsWire);
      const rate = 1000.0 / (p.burst_ms + p.interburst_ms);
      const target = clip(rate, this.envelope.russian_burst_rate_hard);
      if (target !== rate) {
        // Preserve duty cycle while moving the burst rate inside the bound.
        const duty = p.burst_ms / (p.burst_ms + p.interburst_ms);
        const cycleMs = 1000.0 / target;
        return { ...p, burst_ms: duty * cycleMs, interburst_ms: (1 - duty) * cycleMs };
      }
      return p;
    }
    const p = withPulseDefaults(params as PulseParamsWire);
    return {
      ...p,
      frequency_hz: clip(p.frequency_hz, this.envelope.freq_hard),
      pulse_width_us: clip(p.pulse_width_us, this.envelope.width_hard),
    };
  }
}
