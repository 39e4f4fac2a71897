/**
 * Five-tab QSTS dashboard: Overview, Voltage Analysis, Losses, Voltage
 * Heatmap, Topology Map. Every tab renders from gateway payloads through
 * the shared chart components and offers CSV/JSON export links.
 */

import {
  Series,
  lossesAreaChart,
  timeseriesChart,
  voltageBarChart,
  voltageHeatmap,
} from "./charts";
import { renderTopology } from "./topology";
import { BusVoltageEntry, QstsResult, TopologyPayload } from "./types";

export const DASHBOARD_TABS = [
  "overview",
  "voltage-analysis",
  "losses",
  "heatmap",
  "topology",
] as const;

export type DashboardTab = (typeof DASHBOARD_TABS)[number];

function exportButtons(sessionId: string): string {
  return `<div class="export-buttons">` +
    `<a class="export" data-format="csv" href="/api/sessions/${sessionId}/export?format=csv" download>CSV</a>` +
    `<a class="export" data-format="json" href="/api/sessions/${sessionId}/export?format=json" download>JSON</a>` +
    `</div>`;
}

function kpi(label: string, value: string, cls = ""): string {
  return `<div class="kpi ${cls}"><div class="kpi-value">${value}</div>` +
    `<div class="kpi-label">${label}</div></div>`;
}

/** Last-step per-bus voltages in the same payload shape the voltage
 * tools return, so the overview bar chart is the exact shared component
 * the chat surface renders. */
export function snapshotPayload(result: QstsResult): Record<string, BusVoltageEntry> {
  const last = result.voltages_pu[result.voltages_pu.length - 1] ?? {};
  const out: Record<string, BusVoltageEntry> = {};
  for (const bus of Object.keys(last)) {
    out[bus] = { per_unit: last[bus] };
  }
  return out;
}

export function renderOverview(result: QstsResult, sessionId: string): string {
  const s = result.summary;
  const minV = s.min_voltage_pu === null ? "n/a" : s.min_voltage_pu.toFixed(4);
  const maxV = s.max_voltage_pu === null ? "n/a" : s.max_voltage_pu.toFixed(4);
  const bars = result.voltages_pu.length
    ? voltageBarChart(snapshotPayload(result), result.limits_pu)
    : "";
  const losses = result.loss_kw.length
    ? lossesAreaChart(result.loss_kw, result.loss_kvar)
    : "";
  return `<section class="tab-overview">
  <div class="kpi-row">
    ${kpi("min voltage (pu)", minV, "kpi-min")}
    ${kpi("max voltage (pu)", maxV, "kpi-max")}
    ${kpi("violation steps", String(s.violation_step_count), "kpi-violations")}
    ${kpi("violation records", String(s.violation_count))}
    ${kpi("losses (kWh)", s.total_energy_loss_kwh.toFixed(1))}
  </div>
  <p class="kpi-detail">minimum at bus ${s.min_voltage_bus ?? "?"}, step ${s.min_voltage_step ?? "?"};
  maximum at bus ${s.max_voltage_bus ?? "?"}, step ${s.max_voltage_step ?? "?"};
  ${s.steps} steps x ${s.step_hours} h</p>
  <div class="overview-charts">${bars}${losses}</div>
  ${exportButtons(sessionId)}
</section>`;
}

export function seriesFor(result: QstsResult, buses: string[]): Series[] {
  return buses
    .filter((b) => result.bus_ids.includes(b))
    .map((bus) => ({
      name: bus,
      values: result.voltages_pu.map((step) => step[bus]),
    }));
}

export function renderVoltageAnalysis(
  result: QstsResult,
  selected: string[],
  sessionId: string,
): string {
  const chips = result.bus_ids
    .slice()
    .sort()
    .map((bus) => {
      const on = selected.includes(bus) ? " selected" : "";
      return `<button class="chip${on}" data-bus="${bus}">${bus}</button>`;
    })
    .join("");
  const series = seriesFor(result, selected);
  const chart = series.length
    ? timeseriesChart(series, result.limits_pu)
    : `<p class="empty">select buses to overlay their voltage series</p>`;
  return `<section class="tab-voltage-analysis">
  <div class="chips">${chips}</div>
  ${chart}
  ${exportButtons(sessionId)}
</section>`;
}

export function renderLosses(result: QstsResult, sessionId: string): string {
  const chart = result.loss_kw.length
    ? lossesAreaChart(result.loss_kw, result.loss_kvar)
    : `<p class="empty">no loss data</p>`;
  return `<section class="tab-losses">${chart}${exportButtons(sessionId)}</section>`;
}

export function renderHeatmap(result: QstsResult, sessionId: string): string {
  const chart = result.voltages_pu.length
    ? voltageHeatmap(result.bus_ids.slice().sort(), result.voltages_pu)
    : `<p class="empty">no voltage matrix</p>`;
  return `<section class="tab-heatmap">${chart}${exportButtons(sessionId)}</section>`;
}

export function renderTopologyTab(
  topology: TopologyPayload | null,
  sessionId: string,
): string {
  const content = topology
    ? renderTopology(topology)
    : `<p class="empty">no topology loaded</p>`;
  return `<section class="tab-topology">${content}${exportButtons(sessionId)}</section>`;
}

export function renderDashboard(
  result: QstsResult | null,
  topology: TopologyPayload | null,
  active: DashboardTab,
  selectedBuses: string[],
  sessionId: string,
): string {
  const tabs = DASHBOARD_TABS.map((t) => {
    const cls = t === active ? "tab-button active" : "tab-button";
    return `<button class="${cls}" data-tab="${t}">${t.replace("-", " ")}</button>`;
  }).join("");
  let bodyHtml: string;
  if (!result && active !== "topology") {
    bodyHtml = `<p class="empty">run a QSTS simulation to populate the dashboard</p>`;
  } else {
    switch (active) {
      case "overview":
        bodyHtml = renderOverview(result!, sessionId);
        break;
      case "voltage-analysis":
        bodyHtml = renderVoltageAnalysis(result!, selectedBuses, sessionId);
        break;
      case "losses":
        bodyHtml = renderLosses(result!, sessionId);
        break;
      case "heatmap":
        bodyHtml = renderHeatmap(result!, sessionId);
        break;
      case "topology":
        bodyHtml = renderTopologyTab(topology, sessionId);
        break;
    }
  }
  return `<div class="dashboard"><nav class="tabs">${tabs}</nav>${bodyHtml}</div>`;
}
