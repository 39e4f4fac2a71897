/**
 * Payload pattern matching -> chart selection, per docs/chart_mapping.md.
 * The rule table is what keeps chat-inline and dashboard rendering
 * identical: both surfaces route payloads through here.
 */

import {
  Series,
  timeseriesChart,
  voltageBarChart,
} from "./charts";
import { BusVoltageEntry, DEFAULT_LIMITS, ToolEnvelope, VoltageLimits } from "./types";

export type ChartKind = "voltage-bars" | "timeseries" | "multi-timeseries" | "none";

export function selectChart(envelope: ToolEnvelope): ChartKind {
  const data = envelope.data ?? {};
  if (data["voltages"] && typeof data["voltages"] === "object") {
    return "voltage-bars";
  }
  if (Array.isArray(data["steps"]) && Array.isArray(data["voltage_pu"])) {
    return "timeseries";
  }
  if (Array.isArray(data["steps"]) && data["series"] &&
      typeof data["series"] === "object") {
    return "multi-timeseries";
  }
  return "none";
}

/** Render the auto-selected chart for an envelope, or "" when none fits. */
export function renderEnvelopeChart(envelope: ToolEnvelope): string {
  const kind = selectChart(envelope);
  const data = envelope.data as Record<string, unknown>;
  if (kind === "voltage-bars") {
    const limits = (data["limits_pu"] as VoltageLimits) ?? DEFAULT_LIMITS;
    return voltageBarChart(
      data["voltages"] as Record<string, BusVoltageEntry>, limits,
    );
  }
  if (kind === "timeseries") {
    const series: Series[] = [
      { name: String(data["bus"] ?? "bus"), values: data["voltage_pu"] as number[] },
    ];
    return timeseriesChart(series);
  }
  if (kind === "multi-timeseries") {
    const map = data["series"] as Record<string, number[]>;
    const series = Object.keys(map).sort().map((name) => ({
      name,
      values: map[name],
    }));
    return timeseriesChart(series);
  }
  return "";
}
