/**
 * Shared chart components: pure payload -> SVG string renderers.
 *
 * The chat stream and the dashboard call these same functions, so an
 * identical payload renders an identical chart on either surface. All
 * values are read from gateway payloads verbatim.
 */

import { BusVoltageEntry, DEFAULT_LIMITS, VoltageLimits } from "./types";

const W = 640;
const H = 260;
const PAD = { top: 16, right: 16, bottom: 46, left: 52 };

const AMBER_MARGIN = 0.01; // pu distance from a limit that earns amber

export function limitBand(v: number, limits: VoltageLimits): "ok" | "warn" | "violation" {
  if (v < limits.lower || v > limits.upper) return "violation";
  if (v < limits.lower + AMBER_MARGIN || v > limits.upper - AMBER_MARGIN) return "warn";
  return "ok";
}

const BAND_FILL: Record<string, string> = {
  ok: "#2e9e4f",
  warn: "#d9a514",
  violation: "#d43f3f",
};

/** Blue-green-red scale over [0.90, 1.10] pu for topology/heatmap fills. */
export function voltageColor(v: number): string {
  const t = Math.max(0, Math.min(1, (v - 0.9) / 0.2));
  const stops: [number, [number, number, number]][] = [
    [0.0, [41, 98, 255]],
    [0.5, [46, 158, 79]],
    [1.0, [212, 63, 63]],
  ];
  for (let i = 0; i < stops.length - 1; i++) {
    const [t0, c0] = stops[i];
    const [t1, c1] = stops[i + 1];
    if (t <= t1) {
      const f = (t - t0) / (t1 - t0);
      const mix = c0.map((c, k) => Math.round(c + f * (c1[k] - c)));
      return `rgb(${mix[0]},${mix[1]},${mix[2]})`;
    }
  }
  return "rgb(212,63,63)";
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function svgOpen(cls: string, height = H): string {
  return `<svg class="chart ${cls}" viewBox="0 0 ${W} ${height}" ` +
    `xmlns="http://www.w3.org/2000/svg" role="img">`;
}

interface Scale {
  (v: number): number;
}

function yScale(lo: number, hi: number, height = H): Scale {
  const span = hi - lo || 1;
  return (v) => PAD.top + (hi - v) / span * (height - PAD.top - PAD.bottom);
}

function yAxis(lo: number, hi: number, y: Scale, unit: string): string {
  const ticks = 5;
  let out = "";
  for (let i = 0; i <= ticks; i++) {
    const v = lo + (i * (hi - lo)) / ticks;
    out += `<text class="tick" x="${PAD.left - 6}" y="${(y(v) + 3).toFixed(1)}" ` +
      `text-anchor="end">${v.toFixed(unit === "pu" ? 2 : 0)}</text>`;
    out += `<line class="grid" x1="${PAD.left}" y1="${y(v).toFixed(1)}" ` +
      `x2="${W - PAD.right}" y2="${y(v).toFixed(1)}"/>`;
  }
  return out;
}

/**
 * Bar chart for a system-wide voltage payload
 * (`data.voltages`: bus -> {per_unit}). Bars are shaded green/amber/red
 * against the limit band.
 */
export function voltageBarChart(
  voltages: Record<string, BusVoltageEntry>,
  limits: VoltageLimits = DEFAULT_LIMITS,
): string {
  const buses = Object.keys(voltages).sort();
  const values = buses.map((b) => voltages[b].per_unit);
  const lo = Math.min(0.9, ...values) - 0.01;
  const hi = Math.max(1.1, ...values) + 0.01;
  const y = yScale(lo, hi);
  const plotW = W - PAD.left - PAD.right;
  const step = plotW / Math.max(buses.length, 1);
  const barW = Math.min(28, step * 0.7);

  let bars = "";
  buses.forEach((bus, i) => {
    const v = voltages[bus].per_unit;
    const band = limitBand(v, limits);
    const x = PAD.left + i * step + (step - barW) / 2;
    const yTop = y(v);
    const yBase = y(lo);
    bars += `<rect class="bar band-${band}" data-bus="${esc(bus)}" ` +
      `data-pu="${v}" x="${x.toFixed(1)}" y="${yTop.toFixed(1)}" ` +
      `width="${barW.toFixed(1)}" height="${(yBase - yTop).toFixed(1)}" ` +
      `fill="${BAND_FILL[band]}"><title>${esc(bus)}: ${v.toFixed(4)} pu</title></rect>`;
    bars += `<text class="bar-label" x="${(x + barW / 2).toFixed(1)}" ` +
      `y="${H - PAD.bottom + 14}" text-anchor="middle" ` +
      `transform="rotate(45 ${(x + barW / 2).toFixed(1)} ${H - PAD.bottom + 14})"` +
      `>${esc(bus)}</text>`;
  });

  return svgOpen("voltage-bars") +
    yAxis(lo, hi, y, "pu") +
    limitLines(y, limits) +
    bars +
    "</svg>";
}

function limitLines(y: Scale, limits: VoltageLimits): string {
  const line = (v: number, label: string) =>
    `<line class="limit" x1="${PAD.left}" y1="${y(v).toFixed(1)}" ` +
    `x2="${W - PAD.right}" y2="${y(v).toFixed(1)}" stroke="#d43f3f" ` +
    `stroke-dasharray="6 4"/>` +
    `<text class="limit-label" x="${W - PAD.right}" y="${(y(v) - 4).toFixed(1)}" ` +
    `text-anchor="end">${label}</text>`;
  return line(limits.upper, `${limits.upper} pu`) + line(limits.lower, `${limits.lower} pu`);
}

const SERIES_COLORS = ["#2962ff", "#2e9e4f", "#d9a514", "#8e44ad", "#d43f3f",
  "#16a2b8", "#e67e22", "#5d6d7e"];

export interface Series {
  name: string;
  values: number[];
}

/**
 * Overlaid per-step timeseries with dashed red limit lines; one polyline
 * per selected bus.
 */
export function timeseriesChart(
  series: Series[],
  limits: VoltageLimits = DEFAULT_LIMITS,
): string {
  const all = series.flatMap((s) => s.values);
  const lo = Math.min(limits.lower - 0.02, ...all);
  const hi = Math.max(limits.upper + 0.02, ...all);
  const y = yScale(lo, hi);
  const n = Math.max(...series.map((s) => s.values.length), 2);
  const x = (i: number) => PAD.left + (i * (W - PAD.left - PAD.right)) / (n - 1);

  let lines = "";
  series.forEach((s, k) => {
    const pts = s.values.map((v, i) => `${x(i).toFixed(1)},${y(v).toFixed(1)}`);
    const color = SERIES_COLORS[k % SERIES_COLORS.length];
    lines += `<polyline class="series" data-bus="${esc(s.name)}" fill="none" ` +
      `stroke="${color}" stroke-width="1.8" points="${pts.join(" ")}">` +
      `<title>${esc(s.name)}</title></polyline>`;
    lines += `<text class="series-label" x="${W - PAD.right + 2}" ` +
      `y="${(y(s.values[s.values.length - 1] ?? lo) + 3).toFixed(1)}" ` +
      `fill="${color}">${esc(s.name)}</text>`;
  });
  return svgOpen("voltage-timeseries") +
    yAxis(lo, hi, y, "pu") +
    limitLines(y, limits) +
    lines +
    "</svg>";
}

/** Stacked area of per-step real + reactive losses. */
export function lossesAreaChart(lossKw: number[], lossKvar: number[]): string {
  const n = Math.max(lossKw.length, 2);
  const totals = lossKw.map((kw, i) => kw + (lossKvar[i] ?? 0));
  const hi = Math.max(...totals, 1) * 1.05;
  const y = yScale(0, hi);
  const x = (i: number) => PAD.left + (i * (W - PAD.left - PAD.right)) / (n - 1);

  const area = (upper: number[], lower: number[], fill: string, label: string) => {
    const top = upper.map((v, i) => `${x(i).toFixed(1)},${y(v).toFixed(1)}`);
    const bottom = lower.map((v, i) => `${x(i).toFixed(1)},${y(v).toFixed(1)}`).reverse();
    return `<polygon class="area" data-kind="${label}" fill="${fill}" ` +
      `fill-opacity="0.65" points="${top.join(" ")} ${bottom.join(" ")}">` +
      `<title>${label}</title></polygon>`;
  };
  const zeros = lossKw.map(() => 0);
  return svgOpen("losses-area") +
    yAxis(0, hi, y, "kw") +
    area(lossKw, zeros, "#2962ff", "loss_kw") +
    area(totals, lossKw, "#d9a514", "loss_kvar") +
    "</svg>";
}

/** Bus-by-step matrix color-mapped by per-unit voltage. */
export function voltageHeatmap(
  busIds: string[],
  stepVoltages: Record<string, number>[],
): string {
  const rows = busIds.length;
  const cols = Math.max(stepVoltages.length, 1);
  const cellH = Math.max(10, Math.min(18, 200 / Math.max(rows, 1)));
  const height = PAD.top + rows * cellH + PAD.bottom;
  const plotW = W - PAD.left - PAD.right;
  const cellW = plotW / cols;

  let cells = "";
  busIds.forEach((bus, r) => {
    cells += `<text class="tick" x="${PAD.left - 6}" ` +
      `y="${(PAD.top + r * cellH + cellH / 2 + 3).toFixed(1)}" ` +
      `text-anchor="end">${esc(bus)}</text>`;
    stepVoltages.forEach((step, c) => {
      const v = step[bus];
      if (v === undefined) return;
      cells += `<rect class="cell" data-bus="${esc(bus)}" data-step="${c}" ` +
        `x="${(PAD.left + c * cellW).toFixed(1)}" ` +
        `y="${(PAD.top + r * cellH).toFixed(1)}" ` +
        `width="${cellW.toFixed(2)}" height="${cellH.toFixed(2)}" ` +
        `fill="${voltageColor(v)}"><title>${esc(bus)} step ${c}: ` +
        `${v.toFixed(4)} pu</title></rect>`;
    });
  });
  return svgOpen("voltage-heatmap", height) + cells + "</svg>";
}
