import assert from "node:assert/strict";
import { readFileSync } from "node:fs";
import { join } from "node:path";
import { test } from "node:test";

import { voltageColor } from "../src/charts";
import { forceLayout, renderTopology } from "../src/topology";
import { TopologyPayload } from "../src/types";

const FIXTURES = join(__dirname, "..", "..", "fixtures");

function fixture(): TopologyPayload {
  return JSON.parse(
    readFileSync(join(FIXTURES, "topology_ieee13.json"), "utf-8"),
  ) as TopologyPayload;
}

test("node count matches the fixture bus count", () => {
  const payload = fixture();
  const svg = renderTopology(payload);
  const nodes = svg.match(/class="node /g) ?? [];
  assert.equal(nodes.length, payload.nodes.length);
  const edges = svg.match(/class="branch"/g) ?? [];
  assert.equal(edges.length, payload.edges.length);
});

test("the 1.056 pu fixture node lands in the over-limit band", () => {
  const payload = fixture();
  assert.equal(payload.voltages_pu!["rg60"], 1.056);
  const svg = renderTopology(payload);
  const rg60 = svg.match(/<polygon[^>]*data-bus="rg60"[^>]*>/)?.[0];
  assert.ok(rg60, "rg60 node missing (regulator renders as a diamond)");
  assert.ok(rg60!.includes("band-violation"), "rg60 not in the violation band");
  assert.ok(rg60!.includes(`fill="${voltageColor(1.056)}"`));
});

test("five element kinds render five distinct shapes", () => {
  const svg = renderTopology(fixture());
  assert.match(svg, /<rect class="node kind-source/);       // square
  assert.match(svg, /<polygon class="node kind-regulator/); // diamond
  assert.match(svg, /<polygon class="node kind-capacitor/); // triangle
  assert.match(svg, /<circle class="node kind-load/);       // circle
  assert.match(svg, /<circle class="node kind-junction/);   // small circle
});

test("hover tooltip carries name, voltage, and base kV", () => {
  const svg = renderTopology(fixture());
  assert.ok(svg.includes("<title>rg60: 1.0560 pu, base 4.16 kV</title>"));
});

test("missing coordinates engage the force-layout fallback with a badge", () => {
  const payload = fixture();
  for (const node of payload.nodes) node.coord = null;
  const svg = renderTopology(payload);
  assert.ok(svg.includes("force layout (no coordinates)"));
  const nodes = svg.match(/class="node /g) ?? [];
  assert.equal(nodes.length, payload.nodes.length);
});

test("force layout is deterministic and keeps nodes apart", () => {
  const payload = fixture();
  for (const node of payload.nodes) node.coord = null;
  const a = forceLayout(payload);
  const b = forceLayout(payload);
  assert.deepEqual(a, b);
  const ids = Object.keys(a);
  for (let i = 0; i < ids.length; i++) {
    for (let j = i + 1; j < ids.length; j++) {
      const [x1, y1] = a[ids[i]];
      const [x2, y2] = a[ids[j]];
      const d = Math.hypot(x1 - x2, y1 - y2);
      assert.ok(d > 1e-3, `${ids[i]} and ${ids[j]} collapsed`);
    }
  }
});

test("viewport culling drops offscreen nodes on large graphs", () => {
  // synthesize a 600-node chain so culling activates
  const nodes = Array.from({ length: 600 }, (_, i) => ({
    id: `n${i}`,
    coord: [i * 10, 0] as [number, number],
    base_kv: 4.16,
    element_kind: "junction" as const,
  }));
  const edges = Array.from({ length: 599 }, (_, i) => ({
    from: `n${i}`, to: `n${i + 1}`, branch: `b${i}`,
  }));
  const svg = renderTopology(
    { nodes, edges },
    { viewport: { x: 0, y: 0, w: 120, h: 600 } },
  );
  const rendered = svg.match(/class="node /g) ?? [];
  assert.ok(rendered.length < 200, `culling ineffective: ${rendered.length}`);
  assert.ok(rendered.length > 0);
});
