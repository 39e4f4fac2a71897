"use strict";
/**
 * App shell: wires the gateway client, session sidebar, selectors, chat
 * stream, and dashboard tabs to the DOM. State is re-rendered from
 * gateway payloads after every response; nothing optimistic for
 * tool-mutating actions.
 */
Object.defineProperty(exports, "__esModule", { value: true });
const api_1 = require("./api");
const chat_1 = require("./chat");
const dashboard_1 = require("./dashboard");
const state = {
    sessions: [],
    activeSession: null,
    turns: [],
    selectors: { circuit: "ieee13", provider: "scripted", model: "local-model",
        profile: "residential" },
    options: { circuits: [], providers: [], models: ["local-model"], profiles: [] },
    qsts: null,
    topology: null,
    tab: "overview",
    selectedBuses: [],
    banner: null,
};
const client = new api_1.GatewayClient("", localStorage.getItem("feederkit_token") ?? "dev-token");
function el(id) {
    const node = document.getElementById(id);
    if (!node)
        throw new Error(`missing #${id}`);
    return node;
}
function render() {
    el("sidebar").innerHTML = (0, chat_1.renderSessionSidebar)(state.sessions, state.activeSession);
    el("selectors").innerHTML = (0, chat_1.renderSelectors)(state.selectors, state.options);
    el("chat-stream").innerHTML = (0, chat_1.renderChatStream)(state.turns);
    el("dashboard").innerHTML = (0, dashboard_1.renderDashboard)(state.qsts, state.topology, state.tab, state.selectedBuses, state.activeSession ?? "none");
    el("banner").textContent = state.banner ?? "";
    el("banner").style.display = state.banner ? "block" : "none";
}
async function refreshSessions() {
    state.sessions = (await client.listSessions()).sessions;
}
async function refreshOptions() {
    const [circuits, providers, profiles] = await Promise.all([
        client.listCircuits(), client.listProviders(), client.listProfiles(),
    ]);
    state.options.circuits = circuits.circuits.map((c) => c.name);
    state.options.providers = providers.providers;
    state.options.profiles = profiles.profiles.map((p) => p.name);
}
async function selectSession(id) {
    const doc = await client.getSession(id);
    state.activeSession = id;
    state.turns = doc.data.turns;
    const d = doc.data;
    state.selectors = {
        circuit: d["circuit"] ?? null,
        provider: d["provider"] ?? null,
        model: d["model"] ?? null,
        profile: d["profile"] ?? null,
    };
    try {
        state.qsts = await client.getQsts(id);
    }
    catch {
        state.qsts = null;
    }
    try {
        state.topology = await client.getTopology(id);
    }
    catch {
        state.topology = null;
    }
}
async function sendMessage(text) {
    if (!state.activeSession) {
        const created = await client.createSession({
            circuit: state.selectors.circuit ?? undefined,
            provider: state.selectors.provider ?? undefined,
            model: state.selectors.model ?? undefined,
            profile: state.selectors.profile ?? undefined,
        });
        state.activeSession = created.id;
        await refreshSessions();
    }
    const scriptBox = el("script-box");
    let script;
    if (scriptBox.value.trim()) {
        script = JSON.parse(scriptBox.value);
    }
    await client.postMessage(state.activeSession, text, script);
    await selectSession(state.activeSession);
    await refreshSessions();
}
function wireEvents() {
    document.body.addEventListener("click", (event) => {
        const target = event.target;
        const session = target.closest(".session");
        if (session?.dataset.session) {
            void selectSession(session.dataset.session).then(render, showError);
            return;
        }
        if (target.closest(".new-session")) {
            state.activeSession = null;
            state.turns = [];
            state.qsts = null;
            render();
            return;
        }
        const tab = target.closest(".tab-button");
        if (tab?.dataset.tab && dashboard_1.DASHBOARD_TABS.includes(tab.dataset.tab)) {
            state.tab = tab.dataset.tab;
            render();
            return;
        }
        const chip = target.closest(".chip");
        if (chip?.dataset.bus) {
            const bus = chip.dataset.bus;
            state.selectedBuses = state.selectedBuses.includes(bus)
                ? state.selectedBuses.filter((b) => b !== bus)
                : [...state.selectedBuses, bus];
            render();
            return;
        }
    });
    document.body.addEventListener("change", (event) => {
        const select = event.target;
        if (select.dataset?.selector) {
            state.selectors[select.dataset.selector] = select.value;
        }
    });
    el("composer").addEventListener("submit", (event) => {
        event.preventDefault();
        const input = el("message-input");
        const text = input.value.trim();
        if (!text)
            return;
        input.value = "";
        state.banner = null;
        void sendMessage(text).then(render, showError);
    });
}
function showError(err) {
    // connection or API failure: show the banner, keep the stale view
    state.banner = `gateway error: ${err instanceof Error ? err.message : err}`;
    render();
}
async function boot() {
    wireEvents();
    try {
        await Promise.all([refreshSessions(), refreshOptions()]);
        state.banner = null;
    }
    catch (err) {
        showError(err);
        return;
    }
    render();
}
document.addEventListener("DOMContentLoaded", () => {
    void boot();
});
