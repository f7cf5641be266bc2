// Deterministic layered left-to-right layout for the logic graph, matching
// the display convention: propositions feed gates, gates feed the actions
// they conclude. Implies nodes draw antecedent -> gate -> consequent, so a
// rule reads left to right even though the action is a child of the rule in
// the underlying graph.

import type { LnnSnapshot } from "./types.js";

export interface DisplayEdge {
  from: string;
  to: string;
  weight: number;
}

export interface PlacedNode {
  id: string;
  x: number;
  y: number;
  layer: number;
}

export interface GraphLayout {
  nodes: PlacedNode[];
  edges: DisplayEdge[];
  width: number;
  height: number;
}

export const COLUMN_WIDTH = 190;
export const ROW_HEIGHT = 74;
export const MARGIN_X = 90;
export const MARGIN_Y = 46;

/** Rewrites child edges into visual flow edges (see module comment). */
export function displayEdges(snapshot: LnnSnapshot): DisplayEdge[] {
  const kind = new Map(snapshot.nodes.map((n) => [n.id, n.kind]));
  const out: DisplayEdge[] = [];
  const byParent = new Map<string, { child: string; weight: number }[]>();
  for (const e of snapshot.edges) {
    const list = byParent.get(e.parent) ?? [];
    list.push({ child: e.child, weight: e.weight });
    byParent.set(e.parent, list);
  }
  for (const [parent, children] of byParent) {
    if (kind.get(parent) === "implies" && children.length === 2) {
      out.push({ from: children[0].child, to: parent, weight: children[0].weight });
      out.push({ from: parent, to: children[1].child, weight: children[1].weight });
    } else {
      for (const c of children) {
        out.push({ from: c.child, to: parent, weight: c.weight });
      }
    }
  }
  return out;
}

export function layoutGraph(snapshot: LnnSnapshot): GraphLayout {
  const edges = displayEdges(snapshot);
  const incoming = new Map<string, string[]>();
  for (const n of snapshot.nodes) incoming.set(n.id, []);
  for (const e of edges) incoming.get(e.to)?.push(e.from);

  // longest path from a source, guarded against display cycles
  const layer = new Map<string, number>();
  const visiting = new Set<string>();
  const depth = (id: string): number => {
    const known = layer.get(id);
    if (known !== undefined) return known;
    if (visiting.has(id)) return 0;
    visiting.add(id);
    const ins = incoming.get(id) ?? [];
    const d = ins.length === 0 ? 0 : 1 + Math.max(...ins.map(depth));
    visiting.delete(id);
    layer.set(id, d);
    return d;
  };
  for (const n of snapshot.nodes) depth(n.id);

  // actions close the diagram in their own final column
  const actionSet = new Set(snapshot.actions);
  const maxLayer = Math.max(0, ...snapshot.nodes.map((n) => layer.get(n.id) ?? 0));
  const actionLayer = Math.max(
    maxLayer,
    ...snapshot.nodes.filter((n) => actionSet.has(n.id)).map((n) => layer.get(n.id) ?? 0),
  );
  for (const n of snapshot.nodes) {
    if (actionSet.has(n.id)) layer.set(n.id, actionLayer);
  }

  const byLayer = new Map<number, string[]>();
  for (const n of snapshot.nodes) {
    const l = layer.get(n.id) ?? 0;
    const list = byLayer.get(l) ?? [];
    list.push(n.id); // snapshot order within a layer: deterministic
    byLayer.set(l, list);
  }

  const placed: PlacedNode[] = [];
  let maxRows = 1;
  for (const [l, ids] of byLayer) {
    maxRows = Math.max(maxRows, ids.length);
    ids.forEach((id, row) => {
      placed.push({
        id,
        layer: l,
        x: MARGIN_X + l * COLUMN_WIDTH,
        y: MARGIN_Y + row * ROW_HEIGHT,
      });
    });
  }
  placed.sort((a, b) => (a.layer - b.layer) || (a.y - b.y));

  return {
    nodes: placed,
    edges,
    width: MARGIN_X * 2 + (actionLayer + 0.4) * COLUMN_WIDTH,
    height: MARGIN_Y * 2 + (maxRows - 0.4) * ROW_HEIGHT,
  };
}
