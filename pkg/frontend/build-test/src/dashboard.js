"use strict";
/**
 * Five-tab QSTS dashboard: Overview, Voltage Analysis, Losses, Voltage
 * Heatmap, Topology Map. Every tab renders from gateway payloads through
 * the shared chart components and offers CSV/JSON export links.
 */
Object.defineProperty(exports, "__esModule", { value: true });
exports.DASHBOARD_TABS = void 0;
exports.snapshotPayload = snapshotPayload;
exports.renderOverview = renderOverview;
exports.seriesFor = seriesFor;
exports.renderVoltageAnalysis = renderVoltageAnalysis;
exports.renderLosses = renderLosses;
exports.renderHeatmap = renderHeatmap;
exports.renderTopologyTab = renderTopologyTab;
exports.renderDashboard = renderDashboard;
const charts_1 = require("./charts");
const topology_1 = require("./topology");
exports.DASHBOARD_TABS = [
    "overview",
    "voltage-analysis",
    "losses",
    "heatmap",
    "topology",
];
function exportButtons(sessionId) {
    return `<div class="export-buttons">` +
        `<a class="export" data-format="csv" href="/api/sessions/${sessionId}/export?format=csv" download>CSV</a>` +
        `<a class="export" data-format="json" href="/api/sessions/${sessionId}/export?format=json" download>JSON</a>` +
        `</div>`;
}
function kpi(label, value, cls = "") {
    return `<div class="kpi ${cls}"><div class="kpi-value">${value}</div>` +
        `<div class="kpi-label">${label}</div></div>`;
}
/** Last-step per-bus voltages in the same payload shape the voltage
 * tools return, so the overview bar chart is the exact shared component
 * the chat surface renders. */
function snapshotPayload(result) {
    const last = result.voltages_pu[result.voltages_pu.length - 1] ?? {};
    const out = {};
    for (const bus of Object.keys(last)) {
        out[bus] = { per_unit: last[bus] };
    }
    return out;
}
function renderOverview(result, sessionId) {
    const s = result.summary;
    const minV = s.min_voltage_pu === null ? "n/a" : s.min_voltage_pu.toFixed(4);
    const maxV = s.max_voltage_pu === null ? "n/a" : s.max_voltage_pu.toFixed(4);
    const bars = result.voltages_pu.length
        ? (0, charts_1.voltageBarChart)(snapshotPayload(result), result.limits_pu)
        : "";
    const losses = result.loss_kw.length
        ? (0, charts_1.lossesAreaChart)(result.loss_kw, result.loss_kvar)
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
function seriesFor(result, buses) {
    return buses
        .filter((b) => result.bus_ids.includes(b))
        .map((bus) => ({
        name: bus,
        values: result.voltages_pu.map((step) => step[bus]),
    }));
}
function renderVoltageAnalysis(result, selected, sessionId) {
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
        ? (0, charts_1.timeseriesChart)(series, result.limits_pu)
        : `<p class="empty">select buses to overlay their voltage series</p>`;
    return `<section class="tab-voltage-analysis">
  <div class="chips">${chips}</div>
  ${chart}
  ${exportButtons(sessionId)}
</section>`;
}
function renderLosses(result, sessionId) {
    const chart = result.loss_kw.length
        ? (0, charts_1.lossesAreaChart)(result.loss_kw, result.loss_kvar)
        : `<p class="empty">no loss data</p>`;
    return `<section class="tab-losses">${chart}${exportButtons(sessionId)}</section>`;
}
function renderHeatmap(result, sessionId) {
    const chart = result.voltages_pu.length
        ? (0, charts_1.voltageHeatmap)(result.bus_ids.slice().sort(), result.voltages_pu)
        : `<p class="empty">no voltage matrix</p>`;
    return `<section class="tab-heatmap">${chart}${exportButtons(sessionId)}</section>`;
}
function renderTopologyTab(topology, sessionId) {
    const content = topology
        ? (0, topology_1.renderTopology)(topology)
        : `<p class="empty">no topology loaded</p>`;
    return `<section class="tab-topology">${content}${exportButtons(sessionId)}</section>`;
}
function renderDashboard(result, topology, active, selectedBuses, sessionId) {
    const tabs = exports.DASHBOARD_TABS.map((t) => {
        const cls = t === active ? "tab-button active" : "tab-button";
        return `<button class="${cls}" data-tab="${t}">${t.replace("-", " ")}</button>`;
    }).join("");
    let bodyHtml;
    if (!result && active !== "topology") {
        bodyHtml = `<p class="empty">run a QSTS simulation to populate the dashboard</p>`;
    }
    else {
        switch (active) {
            case "overview":
                bodyHtml = renderOverview(result, sessionId);
                break;
            case "voltage-analysis":
                bodyHtml = renderVoltageAnalysis(result, selectedBuses, sessionId);
                break;
            case "losses":
                bodyHtml = renderLosses(result, sessionId);
                break;
            case "heatmap":
                bodyHtml = renderHeatmap(result, sessionId);
                break;
            case "topology":
                bodyHtml = renderTopologyTab(topology, sessionId);
                break;
        }
    }
    return `<div class="dashboard"><nav class="tabs">${tabs}</nav>${bodyHtml}</div>`;
}
