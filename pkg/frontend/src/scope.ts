/**
 * Oscilloscope-style rendering of a preview wave onto a canvas. Pulses are
 * much narrower than a period, so naive polyline drawing would alias them
 * away; each pixel column instead plots the min..max of the samples it
 * covers, which keeps single-sample pulses visible at any zoom.
 */

import type { PreviewWave } from "./preview.js";

export interface ScopeStyle {
  background: string;
  grid: string;
  axis: string;
  trace: string;
  periodMarker: string;
}

export const DEFAULT_STYLE: ScopeStyle = {
  background: "#10141a",
  grid: "#1e2631",
  axis: "#3b4a5c",
  trace: "#53d18a",
  periodMarker: "#2c3a4d",
};

export function drawScope(
  canvas: HTMLCanvasElement,
  wave: PreviewWave,
  style: ScopeStyle = DEFAULT_STYLE,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;  // headless test environments have no 2d context
  const w = canvas.width;
  const h = canvas.height;
  const mid = h / 2;
  const gain = (h / 2) * 0.9;  // leave 10% headroom above full scale
  const n = wave.samples.length;

  ctx.fillStyle = style.background;
  ctx.fillRect(0, 0, w, h);

  // Horizontal quarter lines and the zero axis.
  ctx.strokeStyle = style.grid;
  ctx.lineWidth = 1;
  for (const frac of [0.25, 0.75]) {
    ctx.beginPath();
    ctx.moveTo(0, h * frac);
    ctx.lineTo(w, h * frac);
    ctx.stroke();
  }
  ctx.strokeStyle = style.axis;
  ctx.beginPath();
  ctx.moveTo(0, mid);
  ctx.lineTo(w, mid);
  ctx.stroke();

  // Period boundaries.
  const samplesPerPeriod = wave.periodS * wave.sampleRateHz;
  ctx.strokeStyle = style.periodMarker;
  for (let s = samplesPerPeriod; s < n - 1; s += samplesPerPeriod) {
    const x = (s / n) * w;
    ctx.beginPath();
    ctx.moveTo(x, 0);
    ctx.lineTo(x, h);
    ctx.stroke();
  }

  if (n === 0) return;
  ctx.strokeStyle = style.trace;
  ctx.lineWidth = 1;
  ctx.beginPath();
  for (let x = 0; x < w; x++) {
    const lo = Math.floor((x / w) * n);
    const hi = Math.max(lo + 1, Math.floor(((x + 1) / w) * n));
    let vMin = Infinity;
    let vMax = -Infinity;
    for (let i = lo; i < hi && i < n; i++) {
      const v = wave.samples[i];
      if (v < vMin) vMin = v;
      if (v > vMax) vMax = v;
    }
    if (vMin > vMax) continue;
    // A column spanning [min, max] plus a 1px dot when they coincide.
    const yTop = mid - vMax * gain;
    const yBot = mid - vMin * gain;
    ctx.moveTo(x + 0.5, yTop);
    ctx.lineTo(x + 0.5, yBot === yTop ? yBot + 1 : yBot);
  }
  ctx.stroke();
}
