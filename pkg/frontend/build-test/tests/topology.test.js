"use strict";
var __importDefault = (this && this.__importDefault) || function (mod) {
    return (mod && mod.__esModule) ? mod : { "default": mod };
};
Object.defineProperty(exports, "__esModule", { value: true });
const strict_1 = __importDefault(require("node:assert/strict"));
const node_fs_1 = require("node:fs");
const node_path_1 = require("node:path");
const node_test_1 = require("node:test");
const charts_1 = require("../src/charts");
const topology_1 = require("../src/topology");
const FIXTURES = (0, node_path_1.join)(__dirname, "..", "..", "fixtures");
function fixture() {
    return JSON.parse((0, node_fs_1.readFileSync)((0, node_path_1.join)(FIXTURES, "topology_ieee13.json"), "utf-8"));
}
(0, node_test_1.test)("node count matches the fixture bus count", () => {
    const payload = fixture();
    const svg = (0, topology_1.renderTopology)(payload);
    const nodes = svg.match(/class="node /g) ?? [];
    strict_1.default.equal(nodes.length, payload.nodes.length);
    const edges = svg.match(/class="branch"/g) ?? [];
    strict_1.default.equal(edges.length, payload.edges.length);
});
(0, node_test_1.test)("the 1.056 pu fixture node lands in the over-limit band", () => {
    const payload = fixture();
    strict_1.default.equal(payload.voltages_pu["rg60"], 1.056);
    const svg = (0, topology_1.renderTopology)(payload);
    const rg60 = svg.match(/<polygon[^>]*data-bus="rg60"[^>]*>/)?.[0];
    strict_1.default.ok(rg60, "rg60 node missing (regulator renders as a diamond)");
    strict_1.default.ok(rg60.includes("band-violation"), "rg60 not in the violation band");
    strict_1.default.ok(rg60.includes(`fill="${(0, charts_1.voltageColor)(1.056)}"`));
});
(0, node_test_1.test)("five element kinds render five distinct shapes", () => {
    const svg = (0, topology_1.renderTopology)(fixture());
    strict_1.default.match(svg, /<rect class="node kind-source/); // square
    strict_1.default.match(svg, /<polygon class="node kind-regulator/); // diamond
    strict_1.default.match(svg, /<polygon class="node kind-capacitor/); // triangle
    strict_1.default.match(svg, /<circle class="node kind-load/); // circle
    strict_1.default.match(svg, /<circle class="node kind-junction/); // small circle
});
(0, node_test_1.test)("hover tooltip carries name, voltage, and base kV", () => {
    const svg = (0, topology_1.renderTopology)(fixture());
    strict_1.default.ok(svg.includes("<title>rg60: 1.0560 pu, base 4.16 kV</title>"));
});
(0, node_test_1.test)("missing coordinates engage the force-layout fallback with a badge", () => {
    const payload = fixture();
    for (const node of payload.nodes)
        node.coord = null;
    const svg = (0, topology_1.renderTopology)(payload);
    strict_1.default.ok(svg.includes("force layout (no coordinates)"));
    const nodes = svg.match(/class="node /g) ?? [];
    strict_1.default.equal(nodes.length, payload.nodes.length);
});
(0, node_test_1.test)("force layout is deterministic and keeps nodes apart", () => {
    const payload = fixture();
    for (const node of payload.nodes)
        node.coord = null;
    const a = (0, topology_1.forceLayout)(payload);
    const b = (0, topology_1.forceLayout)(payload);
    strict_1.default.deepEqual(a, b);
    const ids = Object.keys(a);
    for (let i = 0; i < ids.length; i++) {
        for (let j = i + 1; j < ids.length; j++) {
            const [x1, y1] = a[ids[i]];
            const [x2, y2] = a[ids[j]];
            const d = Math.hypot(x1 - x2, y1 - y2);
            strict_1.default.ok(d > 1e-3, `${ids[i]} and ${ids[j]} collapsed`);
        }
    }
});
(0, node_test_1.test)("viewport culling drops offscreen nodes on large graphs", () => {
    // synthesize a 600-node chain so culling activates
    const nodes = Array.from({ length: 600 }, (_, i) => ({
        id: `n${i}`,
        coord: [i * 10, 0],
        base_kv: 4.16,
        element_kind: "junction",
    }));
    const edges = Array.from({ length: 599 }, (_, i) => ({
        from: `n${i}`, to: `n${i + 1}`, branch: `b${i}`,
    }));
    const svg = (0, topology_1.renderTopology)({ nodes, edges }, { viewport: { x: 0, y: 0, w: 120, h: 600 } });
    const rendered = svg.match(/class="node /g) ?? [];
    strict_1.default.ok(rendered.length < 200, `culling ineffective: ${rendered.length}`);
    strict_1.default.ok(rendered.length > 0);
});
