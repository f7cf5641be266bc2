// SVG rendering of a logic-graph snapshot. Legend: rounded boxes are
// propositions, circles are gate connectives, rectangles are actions.
// True nodes fill red; contradictory nodes get a hatched warning style.
// Node tooltips carry the bounds and beta, edge tooltips the weight.

import { layoutGraph } from "./graphLayout.js";
import type { LnnNode, LnnSnapshot } from "./types.js";

const TRUE_FILL = "#e05548";
const PLAIN_FILL = "#ffffff";
const STROKE = "#333333";

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function nodeShape(node: LnnNode, isAction: boolean, x: number, y: number): string {
  const contradictory = node.truth === "contradiction";
  const fill = node.truth === "true" ? TRUE_FILL : contradictory ? "url(#hatch)" : PLAIN_FILL;
  const cls = `node kind-${node.kind} truth-${node.truth}`;
  const title = `<title>${esc(node.label)} [${node.lower.toFixed(2)}, ${node.upper.toFixed(2)}] beta=${node.beta.toFixed(2)}</title>`;
  const textFill = node.truth === "true" ? "#ffffff" : "#111111";

  if (node.kind !== "proposition") {
    const glyph = { and: "∧", or: "∨", not: "¬", implies: "→" }[node.kind];
    return (
      `<g class="${cls}" data-id="${esc(node.id)}" data-truth="${node.truth}">${title}` +
      `<circle cx="${x}" cy="${y}" r="17" fill="${fill}" stroke="${STROKE}"/>` +
      `<text x="${x}" y="${y + 5}" text-anchor="middle" fill="${textFill}" font-size="14">${glyph}</text></g>`
    );
  }
  const w = Math.max(96, node.label.length * 8 + 22);
  const rx = isAction ? 0 : 13;
  return (
    `<g class="${cls}${isAction ? " action" : ""}" data-id="${esc(node.id)}" data-truth="${node.truth}">${title}` +
    `<rect x="${x - w / 2}" y="${y - 16}" width="${w}" height="32" rx="${rx}" fill="${fill}" stroke="${STROKE}"/>` +
    `<text x="${x}" y="${y + 5}" text-anchor="middle" fill="${textFill}" font-size="13">${esc(node.label)}</text></g>`
  );
}

export function renderGraphSvg(snapshot: LnnSnapshot): string {
  const layout = layoutGraph(snapshot);
  const pos = new Map(layout.nodes.map((p) => [p.id, p]));
  const byId = new Map(snapshot.nodes.map((n) => [n.id, n]));
  const actions = new Set(snapshot.actions);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${layout.width} ${layout.height}" ` +
    `width="${layout.width}" height="${layout.height}" class="lnn-graph">`,
  );
  parts.push(
    '<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="7" ' +
    'markerHeight="7" orient="auto-start-reverse"><path d="M 0 0 L 10 5 L 0 10 z" fill="#555"/></marker>' +
    '<pattern id="hatch" width="7" height="7" patternTransform="rotate(45)" patternUnits="userSpaceOnUse">' +
    '<rect width="7" height="7" fill="#ffe08a"/><line x1="0" y1="0" x2="0" y2="7" stroke="#d23f31" stroke-width="3"/></pattern></defs>',
  );

  for (const e of layout.edges) {
    const a = pos.get(e.from);
    const b = pos.get(e.to);
    if (!a || !b) continue;
    parts.push(
      `<g class="edge"><title>weight ${e.weight.toFixed(2)}</title>` +
      `<line x1="${a.x + 20}" y1="${a.y}" x2="${b.x - 24}" y2="${b.y}" ` +
      `stroke="#555" stroke-width="1.4" marker-end="url(#arrow)"/></g>`,
    );
  }
  for (const p of layout.nodes) {
    const node = byId.get(p.id);
    if (node) parts.push(nodeShape(node, actions.has(node.id), p.x, p.y));
  }
  parts.push("</svg>");
  return parts.join("");
}
