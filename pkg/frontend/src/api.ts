/** Thin gateway client. All data the UI shows flows through here. */

import { ChatTurn, QstsResult, SessionSummary, TopologyPayload } from "./types";

export class GatewayClient {
  constructor(
    private base: string = "",
    private token: string = "dev-token",
  ) {}

  setToken(token: string): void {
    this.token = token;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.base + path, {
      method,
      headers: {
        "Authorization": `Bearer ${this.token}`,
        ...(body !== undefined ? { "Content-Type": "application/json" } : {}),
      },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json();
    if (!response.ok) {
      const hint = payload?.hint ? ` (${payload.hint})` : "";
      throw new Error(`${payload?.error ?? response.statusText}${hint}`);
    }
    return payload as T;
  }

  listSessions(): Promise<{ sessions: SessionSummary[] }> {
    return this.request("GET", "/api/sessions");
  }

  createSession(opts: {
    circuit?: string; provider?: string; model?: string; profile?: string;
  }): Promise<{ id: string }> {
    return this.request("POST", "/api/sessions", opts);
  }

  getSession(id: string): Promise<{ id: string; data: { turns: ChatTurn[] } & Record<string, unknown> }> {
    return this.request("GET", `/api/sessions/${id}`);
  }

  postMessage(id: string, text: string, script?: unknown[]): Promise<{
    status: string; final_text: string | null; trace: ChatTurn[];
  }> {
    return this.request("POST", `/api/sessions/${id}/messages`, { text, script });
  }

  listCircuits(): Promise<{ circuits: { name: string }[] }> {
    return this.request("GET", "/api/circuits");
  }

  listProfiles(): Promise<{ profiles: { name: string }[] }> {
    return this.request("GET", "/api/profiles");
  }

  listProviders(): Promise<{ providers: string[] }> {
    return this.request("GET", "/api/providers");
  }

  getQsts(id: string): Promise<QstsResult> {
    return this.request("GET", `/api/sessions/${id}/qsts`);
  }

  getTopology(id: string): Promise<TopologyPayload> {
    return this.request("GET", `/api/sessions/${id}/topology`);
  }
}
