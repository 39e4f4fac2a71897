"use strict";
/**
 * Interactive feeder map: SVG nodes at bus coordinates (force-layout
 * fallback when coordinates are missing), fill color by per-unit
 * voltage, five shapes by element kind, hover tooltip with name,
 * voltage, and base kV. Viewport culling keeps multi-thousand-bus
 * feeders responsive.
 */
Object.defineProperty(exports, "__esModule", { value: true });
exports.forceLayout = forceLayout;
exports.renderTopology = renderTopology;
const charts_1 = require("./charts");
const types_1 = require("./types");
const VIEW_W = 800;
const VIEW_H = 560;
const MARGIN = 40;
const CULL_THRESHOLD = 500; // above this many nodes, skip offscreen ones
/** Deterministic force layout for graphs without coordinates. */
function forceLayout(payload, iterations = 150) {
    const nodes = payload.nodes.map((n) => n.id);
    const pos = {};
    // deterministic ring seeding, no RNG: layouts are reproducible
    nodes.forEach((id, i) => {
        const angle = (2 * Math.PI * i) / nodes.length;
        pos[id] = [Math.cos(angle), Math.sin(angle)];
    });
    const k = 1.2 / Math.sqrt(nodes.length || 1);
    for (let it = 0; it < iterations; it++) {
        const disp = {};
        nodes.forEach((id) => (disp[id] = [0, 0]));
        for (let i = 0; i < nodes.length; i++) {
            for (let j = i + 1; j < nodes.length; j++) {
                const [ax, ay] = pos[nodes[i]];
                const [bx, by] = pos[nodes[j]];
                const dx = ax - bx;
                const dy = ay - by;
                const d2 = dx * dx + dy * dy + 1e-6;
                const f = (k * k) / d2;
                disp[nodes[i]][0] += dx * f;
                disp[nodes[i]][1] += dy * f;
                disp[nodes[j]][0] -= dx * f;
                disp[nodes[j]][1] -= dy * f;
            }
        }
        for (const e of payload.edges) {
            const [ax, ay] = pos[e.from];
            const [bx, by] = pos[e.to];
            const dx = ax - bx;
            const dy = ay - by;
            const d = Math.sqrt(dx * dx + dy * dy) + 1e-6;
            const f = (d * d) / k * 0.02;
            disp[e.from][0] -= (dx / d) * f;
            disp[e.from][1] -= (dy / d) * f;
            disp[e.to][0] += (dx / d) * f;
            disp[e.to][1] += (dy / d) * f;
        }
        const step = 0.08 * (1 - it / iterations) + 0.005;
        nodes.forEach((id) => {
            const [dx, dy] = disp[id];
            const d = Math.sqrt(dx * dx + dy * dy) + 1e-9;
            const clip = Math.min(d, step);
            pos[id][0] += (dx / d) * clip;
            pos[id][1] += (dy / d) * clip;
        });
    }
    return pos;
}
function fitPositions(raw) {
    const xs = Object.values(raw).map((p) => p[0]);
    const ys = Object.values(raw).map((p) => p[1]);
    const minX = Math.min(...xs);
    const maxX = Math.max(...xs);
    const minY = Math.min(...ys);
    const maxY = Math.max(...ys);
    const sx = (VIEW_W - 2 * MARGIN) / (maxX - minX || 1);
    const sy = (VIEW_H - 2 * MARGIN) / (maxY - minY || 1);
    const out = {};
    for (const [id, [x, y]] of Object.entries(raw)) {
        // SVG y axis grows downward; feeder drawings grow upward
        out[id] = [
            MARGIN + (x - minX) * sx,
            VIEW_H - MARGIN - (y - minY) * sy,
        ];
    }
    return out;
}
const SHAPE_SIZE = 9;
function nodeShape(node, x, y, fill, tooltip, band) {
    const s = SHAPE_SIZE;
    const common = `class="node kind-${node.element_kind} band-${band}" ` +
        `data-bus="${node.id}" fill="${fill}" stroke="#222" stroke-width="1"`;
    const title = `<title>${tooltip}</title>`;
    switch (node.element_kind) {
        case "source": // square
            return `<rect ${common} x="${x - s}" y="${y - s}" width="${2 * s}" ` +
                `height="${2 * s}">${title}</rect>`;
        case "regulator": // diamond
            return `<polygon ${common} points="${x},${y - s - 2} ${x + s + 2},${y} ` +
                `${x},${y + s + 2} ${x - s - 2},${y}">${title}</polygon>`;
        case "capacitor": // upward triangle
            return `<polygon ${common} points="${x},${y - s - 1} ${x + s + 1},${y + s} ` +
                `${x - s - 1},${y + s}">${title}</polygon>`;
        case "load": // circle
            return `<circle ${common} cx="${x}" cy="${y}" r="${s - 1}">${title}</circle>`;
        default: // junction: small circle
            return `<circle ${common} cx="${x}" cy="${y}" r="${s - 4}">${title}</circle>`;
    }
}
function renderTopology(payload, options = {}) {
    const haveCoords = payload.nodes.every((n) => n.coord !== null);
    const raw = {};
    if (haveCoords) {
        for (const n of payload.nodes)
            raw[n.id] = [n.coord[0], n.coord[1]];
    }
    else {
        Object.assign(raw, forceLayout(payload));
    }
    const pos = fitPositions(raw);
    const voltages = payload.voltages_pu ?? {};
    const cull = payload.nodes.length > CULL_THRESHOLD && options.viewport;
    const vp = options.viewport;
    const visible = (x, y) => !cull || (x >= vp.x - 20 && x <= vp.x + vp.w + 20 &&
        y >= vp.y - 20 && y <= vp.y + vp.h + 20);
    let edges = "";
    for (const e of payload.edges) {
        const [x1, y1] = pos[e.from];
        const [x2, y2] = pos[e.to];
        if (!visible(x1, y1) && !visible(x2, y2))
            continue;
        edges += `<line class="branch" data-branch="${e.branch}" x1="${x1.toFixed(1)}" ` +
            `y1="${y1.toFixed(1)}" x2="${x2.toFixed(1)}" y2="${y2.toFixed(1)}" ` +
            `stroke="#999" stroke-width="1.4"/>`;
    }
    let nodes = "";
    for (const n of payload.nodes) {
        const [x, y] = pos[n.id];
        if (!visible(x, y))
            continue;
        const v = voltages[n.id];
        const fill = v === undefined ? "#bbb" : (0, charts_1.voltageColor)(v);
        const band = v === undefined ? "unknown" : (0, charts_1.limitBand)(v, types_1.DEFAULT_LIMITS);
        const vText = v === undefined ? "unsolved" : `${v.toFixed(4)} pu`;
        const tooltip = `${n.id}: ${vText}, base ${n.base_kv} kV`;
        nodes += nodeShape(n, x, y, fill, tooltip, band);
        nodes += `<text class="node-label" x="${(x + SHAPE_SIZE + 3).toFixed(1)}" ` +
            `y="${(y + 4).toFixed(1)}">${n.id}</text>`;
    }
    const badge = haveCoords ? "" :
        `<text class="layout-badge" x="${VIEW_W - 8}" y="18" text-anchor="end">` +
            `force layout (no coordinates)</text>`;
    return `<svg class="topology" viewBox="0 0 ${VIEW_W} ${VIEW_H}" ` +
        `xmlns="http://www.w3.org/2000/svg" role="img">${edges}${nodes}${badge}</svg>`;
}
