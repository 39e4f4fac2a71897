import assert from "node:assert/strict";
import { readFileSync } from "node:fs";
import { join } from "node:path";
import { test } from "node:test";

import { renderChatStream, renderExchange, renderToolCallPanel } from "../src/chat";
import { ChatTurn, ToolEnvelope } from "../src/types";

const FIXTURES = join(__dirname, "..", "..", "fixtures");

function voltagesEnvelope(): ToolEnvelope {
  return JSON.parse(
    readFileSync(join(FIXTURES, "voltages_envelope.json"), "utf-8"),
  ) as ToolEnvelope;
}

function exchange(): ChatTurn[] {
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

test("tool panel shows each call with its raw envelope JSON verbatim", () => {
  const turns = exchange();
  const html = renderToolCallPanel(turns);
  assert.ok(html.includes("1 tool call"));
  assert.ok(html.includes("get_all_bus_voltages"));
  // the exact serialized envelope is embedded (HTML-escaped quotes aside)
  const envelope = voltagesEnvelope();
  const pretty = JSON.stringify(envelope, null, 2)
    .replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
  assert.ok(html.includes(pretty));
});

test("voltage envelopes auto-render an inline bar chart", () => {
  const html = renderExchange(exchange());
  assert.ok(html.includes('class="chart voltage-bars"'));
  assert.ok(html.includes("band-violation"));  // rg60 above the limit
});

test("a reply with zero tool calls renders no panel", () => {
  const turns: ChatTurn[] = [
    { role: "user", text: "hello" },
    { role: "assistant", text: "hi, nothing to simulate" },
  ];
  const html = renderExchange(turns);
  assert.ok(!html.includes("tool-panel"));
  assert.ok(html.includes("nothing to simulate"));
});

test("stream splits turns into user-anchored exchanges", () => {
  const turns = [...exchange(), ...exchange()];
  const html = renderChatStream(turns);
  const articles = html.match(/<article class="exchange">/g) ?? [];
  assert.equal(articles.length, 2);
});

test("failed envelopes are marked in the panel", () => {
  const turns: ChatTurn[] = [
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
  const html = renderToolCallPanel(turns);
  assert.ok(html.includes('class="tool-call failed"'));
  assert.ok(html.includes("load the circuit first"));
});
