"use strict";
var __importDefault = (this && this.__importDefault) || function (mod) {
    return (mod && mod.__esModule) ? mod : { "default": mod };
};
Object.defineProperty(exports, "__esModule", { value: true });
const strict_1 = __importDefault(require("node:assert/strict"));
const node_fs_1 = require("node:fs");
const node_path_1 = require("node:path");
const node_test_1 = require("node:test");
const chat_1 = require("../src/chat");
const FIXTURES = (0, node_path_1.join)(__dirname, "..", "..", "fixtures");
function voltagesEnvelope() {
    return JSON.parse((0, node_fs_1.readFileSync)((0, node_path_1.join)(FIXTURES, "voltages_envelope.json"), "utf-8"));
}
function exchange() {
    return [
        { role: "user", text: "What are the bus voltages" },
        {
            role: "assistant",
            text: "",
            tool_calls: [{ tool: "get_all_bus_voltages", args: {} }],
        },
        { role: "tool", tool_result: voltagesEnvelope() },
        { role: "assistant", text: "All buses reported; rg60 runs high." },
    ];
}
(0, node_test_1.test)("tool panel shows each call with its raw envelope JSON verbatim", () => {
    const turns = exchange();
    const html = (0, chat_1.renderToolCallPanel)(turns);
    strict_1.default.ok(html.includes("1 tool call"));
    strict_1.default.ok(html.includes("get_all_bus_voltages"));
    // the exact serialized envelope is embedded (HTML-escaped quotes aside)
    const envelope = voltagesEnvelope();
    const pretty = JSON.stringify(envelope, null, 2)
        .replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
    strict_1.default.ok(html.includes(pretty));
});
(0, node_test_1.test)("voltage envelopes auto-render an inline bar chart", () => {
    const html = (0, chat_1.renderExchange)(exchange());
    strict_1.default.ok(html.includes('class="chart voltage-bars"'));
    strict_1.default.ok(html.includes("band-violation")); // rg60 above the limit
});
(0, node_test_1.test)("a reply with zero tool calls renders no panel", () => {
    const turns = [
        { role: "user", text: "hello" },
        { role: "assistant", text: "hi, nothing to simulate" },
    ];
    const html = (0, chat_1.renderExchange)(turns);
    strict_1.default.ok(!html.includes("tool-panel"));
    strict_1.default.ok(html.includes("nothing to simulate"));
});
(0, node_test_1.test)("stream splits turns into user-anchored exchanges", () => {
    const turns = [...exchange(), ...exchange()];
    const html = (0, chat_1.renderChatStream)(turns);
    const articles = html.match(/<article class="exchange">/g) ?? [];
    strict_1.default.equal(articles.length, 2);
});
(0, node_test_1.test)("failed envelopes are marked in the panel", () => {
    const turns = [
        { role: "user", text: "solve" },
        { role: "assistant", text: "", tool_calls: [{ tool: "solve_power_flow", args: {} }] },
        {
            role: "tool",
            tool_result: {
                success: false, tool: "solve_power_flow",
                data: { error: "no circuit is loaded" },
                hint: "load the circuit first", elapsed_ms: 0.1,
            },
        },
        { role: "assistant", text: "I need a circuit first." },
    ];
    const html = (0, chat_1.renderToolCallPanel)(turns);
    strict_1.default.ok(html.includes('class="tool-call failed"'));
    strict_1.default.ok(html.includes("load the circuit first"));
});
