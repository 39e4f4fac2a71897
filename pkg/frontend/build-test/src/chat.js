"use strict";
/**
 * Chat surface: session sidebar, message stream, and the collapsible
 * tool-call audit panel listing each tool, its arguments, and the raw
 * JSON envelope. Voltage-bearing envelopes auto-render their chart
 * inline through the same components the dashboard uses.
 */
Object.defineProperty(exports, "__esModule", { value: true });
exports.renderSessionSidebar = renderSessionSidebar;
exports.renderToolCallPanel = renderToolCallPanel;
exports.renderExchange = renderExchange;
exports.renderChatStream = renderChatStream;
exports.renderSelectors = renderSelectors;
const autochart_1 = require("./autochart");
function esc(text) {
    return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}
function renderSessionSidebar(sessions, activeId) {
    const items = sessions
        .map((s) => {
        const cls = s.id === activeId ? "session active" : "session";
        return `<li class="${cls}" data-session="${s.id}">
        <span class="session-id">${s.id}</span>
        <span class="session-meta">${esc(s.circuit ?? "no circuit")} · ${s.turn_count} turns</span>
      </li>`;
    })
        .join("");
    return `<ul class="sessions">${items}</ul>
  <button class="new-session">new session</button>`;
}
/** One assistant reply's tool-call audit panel (collapsed by default). */
function renderToolCallPanel(turns) {
    const calls = [];
    let pending = [];
    for (const turn of turns) {
        if (turn.role === "assistant" && turn.tool_calls) {
            pending = pending.concat(turn.tool_calls);
        }
        else if (turn.role === "tool" && turn.tool_result) {
            const call = pending.shift();
            const envelope = turn.tool_result;
            const status = envelope.success ? "ok" : "failed";
            calls.push(`<details class="tool-call ${status}">
  <summary>${esc(envelope.tool)} <span class="status">${status}</span></summary>
  <div class="call-args"><h4>arguments</h4>
    <pre>${esc(JSON.stringify(call?.args ?? {}, null, 2))}</pre></div>
  <div class="call-result"><h4>raw result</h4>
    <pre class="envelope-json">${esc(JSON.stringify(envelope, null, 2))}</pre></div>
</details>`);
        }
    }
    if (!calls.length)
        return "";
    return `<details class="tool-panel"><summary>${calls.length} tool call${calls.length === 1 ? "" : "s"}</summary>${calls.join("")}</details>`;
}
/** The message stream for one exchange (user turn through final text). */
function renderExchange(turns) {
    const user = turns.find((t) => t.role === "user");
    const finals = turns.filter((t) => t.role === "assistant" && !t.tool_calls?.length);
    const finalText = finals.length ? finals[finals.length - 1].text ?? "" : "";
    const charts = turns
        .filter((t) => t.role === "tool" && t.tool_result?.success)
        .map((t) => (0, autochart_1.renderEnvelopeChart)(t.tool_result))
        .filter((svg) => svg !== "")
        .map((svg) => `<div class="inline-chart">${svg}</div>`)
        .join("");
    return `<article class="exchange">
  <div class="msg user"><p>${esc(user?.text ?? "")}</p></div>
  ${renderToolCallPanel(turns)}
  ${charts}
  <div class="msg assistant"><p>${esc(finalText)}</p></div>
</article>`;
}
function renderChatStream(turns) {
    // split the flat turn list into user-anchored exchanges
    const exchanges = [];
    let current = [];
    for (const turn of turns) {
        if (turn.role === "user" && current.length) {
            exchanges.push(current);
            current = [];
        }
        current.push(turn);
    }
    if (current.length)
        exchanges.push(current);
    return exchanges.map(renderExchange).join("\n");
}
/** The four inline selectors defining the simulation context. */
function renderSelectors(state, options) {
    const select = (name, values) => {
        const opts = values
            .map((v) => `<option value="${v}"${state[name] === v ? " selected" : ""}>${v}</option>`)
            .join("");
        return `<label class="selector">${name}
      <select data-selector="${name}">${opts}</select></label>`;
    };
    return `<div class="selectors">
    ${select("circuit", options.circuits)}
    ${select("provider", options.providers)}
    ${select("model", options.models)}
    ${select("profile", options.profiles)}
  </div>`;
}
