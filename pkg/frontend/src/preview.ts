/**
 * Client-side waveform preview.
 *
 * This mirrors the service's shaping rules sample for sample so the preview
 * shows exactly what the output stage renders:
 *
 * - sample counts round half-up and never fall below 1;
 * - a phase of n samples takes the shape's value at k/n
 *   (sine: sin(pi k/n), triangle: 1-|2k/n-1|, saw: k/n, square: 1);
 * - biphasic pulses are phase, gap of exact zeros, negated phase;
 * - pulse/burst onsets sit at round(k * rate / frequency), drift-free;
 * - gain multiplies after shaping; an effective peak above full scale is
 *   an error, never a silent clip.
 *
 * The test suite cross-checks these rules against fixture renders produced
 * by the reference implementation.
 */

import {
  isRussianParams, withPulseDefaults, withRussianDefaults, withSpecDefaults,
  type ParamsWire, type PulseParamsWire, type RussianParamsWire, type Shape,
  type SpecWire,
} from "./protocol.js";

export const FULL_SCALE_TOLERANCE = 1e-9;

export class PreviewError extends Error {}

/** Round a non-negative sample count half-up (23.04 -> 23, 38.5 -> 39). */
export function roundCount(x: number): number {
  return Math.floor(x + 0.5);
}

/** Decibels to linear amplitude factor (0 dB -> exactly 1.0). */
export function dbToLinear(gainDb: number): number {
  return gainDb === 0 ? 1.0 : Math.pow(10, gainDb / 20);
}

/** Peak level after shaping and gain; errors if it would exceed full scale. */
export function effectiveScale(amplitude: number, gainDb: number): number {
  const scale = amplitude * dbToLinear(gainDb);
  if (scale > 1.0 + FULL_SCALE_TOLERANCE) {
    throw new PreviewError(
      `amplitude ${amplitude} at ${gainDb >= 0 ? "+" : ""}${gainDb} dB gives peak ${scale.toPrecision(6)} > full scale`,
    );
  }
  return Math.min(scale, 1.0);
}

/** Samples in one phase: round(width * rate), never below 1. */
export function phaseSampleCount(pulseWidthUs: number, sampleRateHz: number): number {
  return Math.max(1, roundCount(pulseWidthUs * 1e-6 * sampleRateHz));
}

function phaseShape(shape: Shape, n: number): Float64Array {
  const out = new Float64Array(n);
  for (let k = 0; k < n; k++) {
    switch (shape) {
      case "square":
        out[k] = 1.0;
        break;
      case "sine":
        out[k] = Math.sin(Math.PI * k / n);
        break;
      case "triangle":
        out[k] = 1.0 - Math.abs(2.0 * k / n - 1.0);
        break;
      case "saw":
        out[k] = k / n;
        break;
      default:
        throw new PreviewError(`${shape} is not a pulse shape`);
    }
  }
  return out;
}

function checkPulseFitsPeriod(spec: SpecWire, params: Required<PulseParamsWire>): void {
  const periodUs = 1e6 / params.frequency_hz;
  const full = withSpecDefaults(spec);
  const occupied = full.polarity === "biphasic"
    ? 2.0 * params.pulse_width_us + full.interphase_gap_us
    : params.pulse_width_us;
  if (occupied >= periodUs) {
    throw new PreviewError(
      `pulse occupies ${occupied} us but the period at ${params.frequency_hz} Hz is only ${periodUs} us`,
    );
  }
}

/** One pulse: positive phase, optional zero gap, then the negated phase. */
export function synthPulse(spec: SpecWire, p: PulseParamsWire, sampleRateHz: number): Float64Array {
  const params = withPulseDefaults(p);
  const full = withSpecDefaults(spec);
  if (full.shape === "russian") {
    throw new PreviewError("synthPulse handles pulse shapes only, not russian");
  }
  checkPulseFitsPeriod(spec, params);
  const scale = effectiveScale(params.amplitude, params.gain_db);
  const n = phaseSampleCount(params.pulse_width_us, sampleRateHz);
  const phase = phaseShape(full.shape, n);
  if (full.polarity !== "biphasic") {
    const mono = new Float64Array(n);
    for (let k = 0; k < n; k++) mono[k] = scale * phase[k];
    return mono;
  }
  const gap = roundCount(full.interphase_gap_us * 1e-6 * sampleRateHz);
  const out = new Float64Array(2 * n + gap);
  for (let k = 0; k < n; k++) {
    out[k] = scale * phase[k];
    out[n + gap + k] = -scale * phase[k];
  }
  return out;
}

function* trainOnsets(
  frequencyHz: number, sampleRateHz: number, totalSamples: number, pulseLen: number,
): Generator<number> {
  for (let k = 0; ; k++) {
    const onset = roundCount(k * sampleRateHz / frequencyHz);
    if (onset + pulseLen > totalSamples) return;
    yield onset;
  }
}

/** Pulse train of the given duration; inter-pulse samples are exact zeros. */
export function renderTrain(
  spec: SpecWire, params: PulseParamsWire, durationS: number, sampleRateHz: number,
): Float64Array {
  if (durationS < 0) throw new PreviewError(`duration must be >= 0, got ${durationS}`);
  const total = roundCount(durationS * sampleRateHz);
  const pulse = synthPulse(spec, params, sampleRateHz);
  const out = new Float64Array(total);
  for (const onset of trainOnsets(params.frequency_hz, sampleRateHz, total, pulse.length)) {
    out.set(pulse, onset);
  }
  return out;
}

function russianBurst(p: Required<RussianParamsWire>, sampleRateHz: number): Float64Array {
  if (p.carrier_hz >= sampleRateHz / 2) {
    throw new PreviewError(
      `carrier ${p.carrier_hz} Hz is not resolvable at ${sampleRateHz} Hz`,
    );
  }
  const scale = effectiveScale(p.amplitude, p.gain_db);
  const n = Math.max(1, roundCount(p.burst_ms * 1e-3 * sampleRateHz));
  const out = new Float64Array(n);
  for (let j = 0; j < n; j++) {
    out[j] = scale * Math.sin(2.0 * Math.PI * p.carrier_hz * j / sampleRateHz);
  }
  return out;
}

/** Burst-gated carrier; burst phase resets to zero at each burst start. */
export function renderRussian(
  params: RussianParamsWire, durationS: number, sampleRateHz: number,
): Float64Array {
  if (durationS < 0) throw new PreviewError(`duration must be >= 0, got ${durationS}`);
  const p = withRussianDefaults(params);
  const total = roundCount(durationS * sampleRateHz);
  const burst = russianBurst(p, sampleRateHz);
  const out = new Float64Array(total);
  if (p.interburst_ms === 0) {
    // Degenerate 100% duty: continuous carrier, phase reset each burst length.
    for (let onset = 0; onset < total; onset += burst.length) {
      const len = Math.min(burst.length, total - onset);
      out.set(burst.subarray(0, len), onset);
    }
  } else {
    const burstRate = 1000.0 / (p.burst_ms + p.interburst_ms);
    for (const onset of trainOnsets(burstRate, sampleRateHz, total, burst.length)) {
      out.set(burst, onset);
    }
  }
  return out;
}

export interface PreviewWave {
  samples: Float64Array;
  sampleRateHz: number;
  /** One repetition period in seconds (pulse period or burst cycle). */
  periodS: number;
  durationS: number;
}

/**
 * Render at least `minPeriods` full periods of the configured waveform,
 * exactly as the output stage would produce them.
 */
export function previewWave(
  spec: SpecWire, params: ParamsWire, sampleRateHz: number, minPeriods = 2,
): PreviewWave {
  if (minPeriods < 2) minPeriods = 2;
  if (spec.shape === "russian" || isRussianParams(params)) {
    const p = withRussianDefaults(params as RussianParamsWire);
    const periodS = (p.burst_ms + p.interburst_ms) / 1000.0;
    const durationS = minPeriods * periodS;
    return {
      samples: renderRussian(p, durationS, sampleRateHz),
      sampleRateHz,
      periodS,
      durationS,
    };
  }
  const p = params as PulseParamsWire;
  const periodS = 1.0 / p.frequency_hz;
  const durationS = minPeriods * periodS;
  return {
    samples: renderTrain(spec, p, durationS, sampleRateHz),
    sampleRateHz,
    periodS,
    durationS,
  };
}
