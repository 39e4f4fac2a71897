"use strict";
/**
 * Payload pattern matching -> chart selection, per docs/chart_mapping.md.
 * The rule table is what keeps chat-inline and dashboard rendering
 * identical: both surfaces route payloads through here.
 */
Object.defineProperty(exports, "__esModule", { value: true });
exports.selectChart = selectChart;
exports.renderEnvelopeChart = renderEnvelopeChart;
const charts_1 = require("./charts");
const types_1 = require("./types");
function selectChart(envelope) {
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
function renderEnvelopeChart(envelope) {
    const kind = selectChart(envelope);
    const data = envelope.data;
    if (kind === "voltage-bars") {
        const limits = data["limits_pu"] ?? types_1.DEFAULT_LIMITS;
        return (0, charts_1.voltageBarChart)(data["voltages"], limits);
    }
    if (kind === "timeseries") {
        const series = [
            { name: String(data["bus"] ?? "bus"), values: data["voltage_pu"] },
        ];
        return (0, charts_1.timeseriesChart)(series);
    }
    if (kind === "multi-timeseries") {
        const map = data["series"];
        const series = Object.keys(map).sort().map((name) => ({
            name,
            values: map[name],
        }));
        return (0, charts_1.timeseriesChart)(series);
    }
    return "";
}
