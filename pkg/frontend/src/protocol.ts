/**
 * Wire types for the control-service protocol: newline-delimited JSON
 * over a duplex byte stream, one reply per request, ids echoed verbatim.
 */

export const PROTOCOL_VERSION = 1;

export type Shape = "sine" | "triangle" | "saw" | "square" | "russian";
export type Polarity = "monophasic" | "biphasic";
export type RunState = "idle" | "running" | "stopped_emergency";
export type Verdict = "pass" | "pass_with_warnings" | "reject";
export type Severity = "hard" | "warning";

export const PULSE_SHAPES: Shape[] = ["sine", "triangle", "saw", "square"];

export interface SpecWire {
  shape: Shape;
  polarity?: Polarity;          // default monophasic on the wire
  interphase_gap_us?: number;   // biphasic only
}

export interface PulseParamsWire {
  frequency_hz: number;
  pulse_width_us: number;
  amplitude: number;            // 0..1 of full scale
  gain_db?: number;
}

export interface RussianParamsWire {
  carrier_hz?: number;          // default 2500
  burst_ms?: number;            // default 10
  interburst_ms?: number;       // default 10
  amplitude: number;
  gain_db?: number;
}

export type ParamsWire = PulseParamsWire | RussianParamsWire;

export interface EnvelopeWire {
  freq_hard: [number, number];
  freq_typical: [number, number];
  width_hard: [number, number];
  max_continuous_s: number;
  russian_burst_rate_hard: [number, number];
}

export interface FindingWire {
  parameter: string;
  bound: [number, number];
  severity: Severity;
  message: string;
}

export interface ValidationWire {
  verdict: Verdict;
  findings: FindingWire[];
}

export interface SessionStateWire {
  run_state: RunState;
  spec: SpecWire;
  params: ParamsWire;
  sample_rate_hz: number;
  samples_emitted: number;
  uptime_s: number;
  last_validation: ValidationWire | null;
  envelope: EnvelopeWire;
}

export type RequestKind =
  | "hello" | "set_params" | "start" | "stop"
  | "emergency_stop" | "rearm" | "status";

export interface Request {
  id: number | string;
  kind: RequestKind;
  spec?: SpecWire;
  params?: ParamsWire;
}

/** Every reply carries ok plus the echoed id; the rest varies by kind. */
export interface Reply {
  id: number | string | null;
  ok: boolean;
  error?: string;
  // hello
  server?: string;
  protocol?: number;
  role?: "controller" | "observer";
  sample_rate_hz?: number;
  chunk_size?: number;
  clamp_mode?: boolean;
  envelope?: EnvelopeWire;
  // hello / status / start / rearm
  state?: SessionStateWire;
  last_error?: string | null;
  // set_params
  applied?: { spec: SpecWire; params: ParamsWire };
  validation?: ValidationWire | null;
  clamped?: boolean;
  received_at_sample?: number;
  applied_at_sample?: number;
  effective_sample?: number;
  // start / stop / emergency_stop
  at_sample?: number;
  silent_from_sample?: number;
  zero_from_sample?: number;
}

export function isRussianParams(p: ParamsWire): p is RussianParamsWire {
  return !("frequency_hz" in p);
}

export function isRussianSpec(spec: SpecWire): boolean {
  return spec.shape === "russian";
}

/** Serialize one request frame (compact JSON + newline terminator). */
export function encodeRequest(req: Request): string {
  return JSON.stringify(req) + "\n";
}

/** Parse one reply line; throws on anything but a JSON object with ok. */
export function decodeReply(line: string): Reply {
  let value: unknown;
  try {
    value = JSON.parse(line);
  } catch (err) {
    throw new Error(`reply is not valid JSON: ${(err as Error).message}`);
  }
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    throw new Error("reply is not a JSON object");
  }
  const reply = value as Record<string, unknown>;
  if (typeof reply.ok !== "boolean") {
    throw new Error("reply is missing boolean 'ok'");
  }
  return reply as unknown as Reply;
}

/** Defaults the service fills in for omitted optional fields. */
export function withSpecDefaults(spec: SpecWire): Required<Omit<SpecWire, "interphase_gap_us">> & { interphase_gap_us: number } {
  return {
    shape: spec.shape,
    polarity: spec.polarity ?? "monophasic",
    interphase_gap_us: spec.interphase_gap_us ?? 0,
  };
}

export function withPulseDefaults(p: PulseParamsWire): Required<PulseParamsWire> {
  return {
    frequency_hz: p.frequency_hz,
    pulse_width_us: p.pulse_width_us,
    amplitude: p.amplitude,
    gain_db: p.gain_db ?? 0,
  };
}

export function withRussianDefaults(p: RussianParamsWire): Required<RussianParamsWire> {
  return {
    carrier_hz: p.carrier_hz ?? 2500,
    burst_ms: p.burst_ms ?? 10,
    interburst_ms: p.interburst_ms ?? 10,
    amplitude: p.amplitude,
    gain_db: p.gain_db ?? 0,
  };
}
