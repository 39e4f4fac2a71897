"use strict";
/** Thin gateway client. All data the UI shows flows through here. */
Object.defineProperty(exports, "__esModule", { value: true });
exports.GatewayClient = void 0;
class GatewayClient {
    constructor(base = "", token = "dev-token") {
        this.base = base;
        this.token = token;
    }
    setToken(token) {
        this.token = token;
    }
    async request(method, path, body) {
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
        return payload;
    }
    listSessions() {
        return this.request("GET", "/api/sessions");
    }
    createSession(opts) {
        return this.request("POST", "/api/sessions", opts);
    }
    getSession(id) {
        return this.request("GET", `/api/sessions/${id}`);
    }
    postMessage(id, text, script) {
        return this.request("POST", `/api/sessions/${id}/messages`, { text, script });
    }
    listCircuits() {
        return this.request("GET", "/api/circuits");
    }
    listProfiles() {
        return this.request("GET", "/api/profiles");
    }
    listProviders() {
        return this.request("GET", "/api/providers");
    }
    getQsts(id) {
        return this.request("GET", `/api/sessions/${id}/qsts`);
    }
    getTopology(id) {
        return this.request("GET", `/api/sessions/${id}/topology`);
    }
}
exports.GatewayClient = GatewayClient;
