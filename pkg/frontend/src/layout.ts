/**
 * Deterministic diagram layout. Class nodes are layered by inheritance
 * depth (generalization edges run vertically, subclass below superclass)
 * with associations spanning horizontally; object nodes form a grid in
 * instance-id order. Pure functions of their inputs: the same model and
 * view always land on the same coordinates.
 */

import { ModelDoc, ancestry } from "./model.js";
import { ViewState } from "./viewstate.js";

export interface NodeBox {
  key: string;
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface LayoutEdge {
  from: string;
  to: string;
  kind: "generalization" | "association" | "composition" | "link" | "connector";
  label: string;
}

export interface DiagramLayout {
  nodes: NodeBox[];
  edges: LayoutEdge[];
  width: number;
  height: number;
}

const CLASS_W = 190;
const OBJ_W = 210;
const LINE_H = 16;
const HEADER_H = 26;
const GAP_X = 60;
const GAP_Y = 70;

export function classLayout(model: ModelDoc): DiagramLayout {
  const layers = new Map<number, string[]>();
  for (const c of model.classes) {
    const depth = ancestry(model, c.name).length - 1;
    const layer = layers.get(depth) ?? [];
    layer.push(c.name);
    layers.set(depth, layer);
  }
  const nodes: NodeBox[] = [];
  let width = 0;
  let height = 0;
  for (const depth of [...layers.keys()].sort((a, b) => a - b)) {
    const layer = layers.get(depth)!;
    layer.forEach((name, i) => {
      const c = model.classes.find((k) => k.name === name)!;
      const lines = 2 + c.attributes.length + c.methods.length;
      const h = HEADER_H + lines * LINE_H;
      const x = i * (CLASS_W + GAP_X) + 20;
      const y = depth * (HEADER_H + 6 * LINE_H + GAP_Y) + 20;
      nodes.push({ key: name, x, y, w: CLASS_W, h });
      width = Math.max(width, x + CLASS_W + 20);
      height = Math.max(height, y + h + 20);
    });
  }
  const edges: LayoutEdge[] = [];
  for (const g of model.generalizations) {
    edges.push({ from: g.sub, to: g.super, kind: "generalization", label: "" });
  }
  for (const r of model.relations) {
    edges.push({
      from: r.from,
      to: r.to,
      kind: r.kind,
      label: `${r.id} ${r.fromMult}→${r.toMult}`,
    });
  }
  return { nodes, edges, width, height };
}

export function objectLayout(state: ViewState): DiagramLayout {
  const ids = [...state.objects.keys()].sort((a, b) => a - b);
  const perRow = Math.max(1, Math.ceil(Math.sqrt(ids.length)));
  const nodes: NodeBox[] = [];
  let width = 0;
  let height = 0;
  ids.forEach((id, i) => {
    const node = state.objects.get(id)!;
    const lines = 2 + Object.keys(node.attrs).length + node.methods.length;
    const h = HEADER_H + lines * LINE_H;
    const x = (i % perRow) * (OBJ_W + GAP_X) + 20;
    const y = Math.floor(i / perRow) * (HEADER_H + 8 * LINE_H + GAP_Y) + 20;
    nodes.push({ key: `#${id}`, x, y, w: OBJ_W, h });
    width = Math.max(width, x + OBJ_W + 20);
    height = Math.max(height, y + h + 20);
  });
  const edges: LayoutEdge[] = state.links.map((l) => ({
    from: `#${l.a}`,
    to: `#${l.b}`,
    kind: "link" as const,
    label: l.rel,
  }));
  return { nodes, edges, width, height };
}
