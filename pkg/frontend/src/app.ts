/**
 * App shell: wires the gateway client, session sidebar, selectors, chat
 * stream, and dashboard tabs to the DOM. State is re-rendered from
 * gateway payloads after every response; nothing optimistic for
 * tool-mutating actions.
 */

import { GatewayClient } from "./api";
import { renderChatStream, renderSelectors, renderSessionSidebar, SelectorState } from "./chat";
import { DASHBOARD_TABS, DashboardTab, renderDashboard } from "./dashboard";
import { ChatTurn, QstsResult, SessionSummary, TopologyPayload } from "./types";

interface AppState {
  sessions: SessionSummary[];
  activeSession: string | null;
  turns: ChatTurn[];
  selectors: SelectorState;
  options: { circuits: string[]; providers: string[]; models: string[];
             profiles: string[] };
  qsts: QstsResult | null;
  topology: TopologyPayload | null;
  tab: DashboardTab;
  selectedBuses: string[];
  banner: string | null;
}

const state: AppState = {
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

const client = new GatewayClient("", localStorage.getItem("feederkit_token") ?? "dev-token");

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function render(): void {
  el("sidebar").innerHTML = renderSessionSidebar(state.sessions, state.activeSession);
  el("selectors").innerHTML = renderSelectors(state.selectors, state.options);
  el("chat-stream").innerHTML = renderChatStream(state.turns);
  el("dashboard").innerHTML = renderDashboard(
    state.qsts, state.topology, state.tab, state.selectedBuses,
    state.activeSession ?? "none",
  );
  el("banner").textContent = state.banner ?? "";
  el("banner").style.display = state.banner ? "block" : "none";
}

async function refreshSessions(): Promise<void> {
  state.sessions = (await client.listSessions()).sessions;
}

async function refreshOptions(): Promise<void> {
  const [circuits, providers, profiles] = await Promise.all([
    client.listCircuits(), client.listProviders(), client.listProfiles(),
  ]);
  state.options.circuits = circuits.circuits.map((c) => c.name);
  state.options.providers = providers.providers;
  state.options.profiles = profiles.profiles.map((p) => p.name);
}

async function selectSession(id: string): Promise<void> {
  const doc = await client.getSession(id);
  state.activeSession = id;
  state.turns = doc.data.turns;
  const d = doc.data as Record<string, unknown>;
  state.selectors = {
    circuit: (d["circuit"] as string) ?? null,
    provider: (d["provider"] as string) ?? null,
    model: (d["model"] as string) ?? null,
    profile: (d["profile"] as string) ?? null,
  };
  try {
    state.qsts = await client.getQsts(id);
  } catch {
    state.qsts = null;
  }
  try {
    state.topology = await client.getTopology(id);
  } catch {
    state.topology = null;
  }
}

async function sendMessage(text: string): Promise<void> {
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
  const scriptBox = el("script-box") as HTMLTextAreaElement;
  let script: unknown[] | undefined;
  if (scriptBox.value.trim()) {
    script = JSON.parse(scriptBox.value);
  }
  await client.postMessage(state.activeSession, text, script);
  await selectSession(state.activeSession);
  await refreshSessions();
}

function wireEvents(): void {
  document.body.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const session = target.closest<HTMLElement>(".session");
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
    const tab = target.closest<HTMLElement>(".tab-button");
    if (tab?.dataset.tab && (DASHBOARD_TABS as readonly string[]).includes(tab.dataset.tab)) {
      state.tab = tab.dataset.tab as DashboardTab;
      render();
      return;
    }
    const chip = target.closest<HTMLElement>(".chip");
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
    const select = event.target as HTMLSelectElement;
    if (select.dataset?.selector) {
      state.selectors[select.dataset.selector as keyof SelectorState] = select.value;
    }
  });

  (el("composer") as HTMLFormElement).addEventListener("submit", (event) => {
    event.preventDefault();
    const input = el("message-input") as HTMLInputElement;
    const text = input.value.trim();
    if (!text) return;
    input.value = "";
    state.banner = null;
    void sendMessage(text).then(render, showError);
  });
}

function showError(err: unknown): void {
  // connection or API failure: show the banner, keep the stale view
  state.banner = `gateway error: ${err instanceof Error ? err.message : err}`;
  render();
}

async function boot(): Promise<void> {
  wireEvents();
  try {
    await Promise.all([refreshSessions(), refreshOptions()]);
    state.banner = null;
  } catch (err) {
    showError(err);
    return;
  }
  render();
}

document.addEventListener("DOMContentLoaded", () => {
  void boot();
});
