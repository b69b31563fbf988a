/** Pure scene builders: server payloads in, drawable primitives out.
 * All science numbers (Jaccard, coherence, entropies) pass through verbatim;
 * this module only decides geometry and styling. */

import { categoryColors, sequential } from "./colors.js";
import type { PositionMap } from "./anim.js";
import type {
  AlignmentsPayload,
  BubblePayload,
  MapperGraphPayload,
  MergePayload,
  ProjectionPayload,
  Side,
} from "./types.js";

export interface CircleMark {
  kind: "circle";
  x: number;
  y: number;
  r: number;
  fill: string;
  highlight: boolean;
  ref: { type: "node" | "item" | "supernode"; side: Side; id: number | string };
}

export interface PieMark {
  kind: "pie";
  x: number;
  y: number;
  r: number;
  slices: { color: string; fraction: number }[];
  highlight: boolean;
  ref: { type: "node"; side: Side; id: number };
}

export interface LineMark {
  kind: "line";
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  width: number;
  color: string;
  ref?: { type: "inter" | "intra" | "membrane-inter"; side?: Side; a: number; b: number };
}

export interface PolygonMark {
  kind: "polygon";
  points: [number, number][];
  fillOpacity: number;
  stroke: string;
  highlight: boolean;
  ref: { type: "bubble"; pairId: number; side: Side };
}

export type Mark = CircleMark | PieMark | LineMark | PolygonMark;

export type Coloring = { mode: "categorical" } | { mode: "numeric"; attr: string } | { mode: "none" };

export interface OverviewOptions {
  coloring: Coloring;
  showOverlay: boolean;
  highlightedItems: Set<string>;
  highlightedPair: number | null;
  motifFilter: string | null;
  visiblePairIds: Set<number>;
  nodeRadiusScale: number;
}

const NODE_BASE_RADIUS = 0.035;

export function nodeRadius(memberCount: number, scale: number): number {
  return NODE_BASE_RADIUS * scale * Math.sqrt(Math.max(memberCount, 1));
}

/** Sinusoidal normal perturbation; amplitude grows as coherence drops. */
export function wavyPolygon(
  points: [number, number][],
  coherence: number,
  waves = 18,
  amplitudeScale = 0.03,
): [number, number][] {
  const coherence01 = (Math.max(-1, Math.min(1, coherence)) + 1) / 2;
  const amplitude = amplitudeScale * (1 - coherence01);
  if (amplitude <= 0 || points.length < 4) return points;
  const n = points.length;
  const out: [number, number][] = [];
  for (let i = 0; i < n; i++) {
    const prev = points[(i - 1 + n) % n];
    const next = points[(i + 1) % n];
    const tx = next[0] - prev[0];
    const ty = next[1] - prev[1];
    const len = Math.hypot(tx, ty) || 1;
    const nx = -ty / len;
    const ny = tx / len;
    const offset = amplitude * Math.sin((i / n) * waves * 2 * Math.PI);
    out.push([points[i][0] + nx * offset, points[i][1] + ny * offset]);
  }
  return out;
}

function nodeMeanAttr(members: string[], perItem: Record<string, number>): number | null {
  let sum = 0;
  let count = 0;
  for (const item of members) {
    const value = perItem[item];
    if (value !== undefined) {
      sum += value;
      count += 1;
    }
  }
  return count ? sum / count : null;
}

export function mapperScene(
  side: Side,
  graph: MapperGraphPayload,
  positions: PositionMap,
  projection: ProjectionPayload | null,
  alignments: AlignmentsPayload | null,
  options: OverviewOptions,
): Mark[] {
  const marks: Mark[] = [];
  const pos = positions[side];

  if (options.showOverlay && alignments) {
    for (const bubble of alignments.bubbles) {
      if (bubble.side !== side || bubble.empty || !bubble.polygon) continue;
      if (!options.visiblePairIds.has(bubble.pair_id)) continue;
      marks.push(bubblePolygon(bubble, options.highlightedPair === bubble.pair_id));
    }
  }

  for (const [u, v] of graph.edges) {
    const pu = pos[String(u)];
    const pv = pos[String(v)];
    if (!pu || !pv) continue;
    marks.push({
      kind: "line",
      x1: pu[0],
      y1: pu[1],
      x2: pv[0],
      y2: pv[1],
      width: 1,
      color: "#b5b5b5",
      ref: { type: "intra", side, a: u, b: v },
    });
  }

  const labelColors = projection ? categoryColors(Object.values(projection.labels)) : new Map<string, string>();
  const attrRange = { min: Infinity, max: -Infinity };
  if (options.coloring.mode === "numeric" && projection) {
    const perItem = projection.numeric_attrs[options.coloring.attr] ?? {};
    for (const value of Object.values(perItem)) {
      attrRange.min = Math.min(attrRange.min, value);
      attrRange.max = Math.max(attrRange.max, value);
    }
  }

  for (const node of graph.nodes) {
    const xy = pos[String(node.id)];
    if (!xy) continue;
    const r = nodeRadius(node.members.length, options.nodeRadiusScale);
    const highlight = node.members.some((item) => options.highlightedItems.has(item));
    if (options.coloring.mode === "categorical" && projection) {
      const counts = new Map<string, number>();
      for (const item of node.members) {
        const label = projection.labels[item] ?? "?";
        counts.set(label, (counts.get(label) ?? 0) + 1);
      }
      const slices = [...counts.entries()]
        .sort((x, y) => (x[0] < y[0] ? -1 : 1))
        .map(([label, count]) => ({
          color: labelColors.get(label) ?? "#999999",
          fraction: count / node.members.length,
        }));
      marks.push({ kind: "pie", x: xy[0], y: xy[1], r, slices, highlight, ref: { type: "node", side, id: node.id } });
    } else {
      let fill = "#7a7a7a";
      if (options.coloring.mode === "numeric" && projection && attrRange.max > attrRange.min) {
        const mean = nodeMeanAttr(node.members, projection.numeric_attrs[options.coloring.attr] ?? {});
        if (mean !== null) {
          fill = sequential((mean - attrRange.min) / (attrRange.max - attrRange.min));
        }
      }
      marks.push({ kind: "circle", x: xy[0], y: xy[1], r, fill, highlight, ref: { type: "node", side, id: node.id } });
    }
  }
  return marks;
}

function bubblePolygon(bubble: BubblePayload, highlight: boolean): PolygonMark {
  const coherence = bubble.coherence ?? 0;
  const content = bubble.content_jaccard ?? 0;
  return {
    kind: "polygon",
    points: wavyPolygon(bubble.polygon ?? [], coherence),
    fillOpacity: 0.08 + 0.55 * content,
    stroke: "#6b6b6b",
    highlight,
    ref: { type: "bubble", pairId: bubble.pair_id, side: bubble.side },
  };
}

export function projectionScene(
  side: Side,
  projection: ProjectionPayload,
  options: OverviewOptions,
): Mark[] {
  const marks: Mark[] = [];
  const labelColors = categoryColors(Object.values(projection.labels));
  const attr = options.coloring.mode === "numeric" ? projection.numeric_attrs[options.coloring.attr] ?? {} : {};
  let min = Infinity;
  let max = -Infinity;
  for (const value of Object.values(attr)) {
    min = Math.min(min, value);
    max = Math.max(max, value);
  }
  for (const [item, xy] of Object.entries(projection[side])) {
    let fill = "#7a7a7a";
    if (options.coloring.mode === "categorical") {
      fill = labelColors.get(projection.labels[item] ?? "") ?? "#999999";
    } else if (options.coloring.mode === "numeric" && max > min && attr[item] !== undefined) {
      fill = sequential((attr[item] - min) / (max - min));
    }
    marks.push({
      kind: "circle",
      x: xy[0],
      y: xy[1],
      r: 0.01,
      fill,
      highlight: options.highlightedItems.has(item),
      ref: { type: "item", side, id: item },
    });
  }
  return marks;
}

export interface MembraneSceneOptions {
  overrides: Map<number, [number, number]>;  // client-side drags, never sent upstream
  highlightedEdge: { a: number; b: number } | null;
}

export interface MembraneScene {
  ovals: { id: number; side: Side; x: number; y: number; r: number }[];
  interEdges: (LineMark & { weightRef: { a: number; b: number } })[];
  internal: Mark[];
  gap: number;
}

/** Two-layer membrane: ovals on the layers, internal structures floating
 * outward (side a above its layer, side b below), inter-edges between. */
export function membraneScene(merge: MergePayload, options: MembraneSceneOptions): MembraneScene {
  const { membrane, state } = merge;
  const bySide = new Map(state.map((s) => [s.id, s.side] as const));
  const ovals: MembraneScene["ovals"] = [];
  const internal: Mark[] = [];

  const position = (id: number): [number, number] => {
    const override = options.overrides.get(id);
    return override ?? membrane.supernode_positions[String(id)] ?? [0, 0];
  };

  for (const supernode of state) {
    const [x, y] = position(supernode.id);
    const r = membrane.oval_radii[String(supernode.id)] ?? 0.08;
    ovals.push({ id: supernode.id, side: supernode.side, x, y, r });

    const outward = supernode.side === "a" ? -1 : 1;
    const centerY = y + outward * (r + 0.35 * membrane.gap);
    const local = membrane.internal_layouts[String(supernode.id)] ?? {};
    const entries = Object.entries(local);
    for (const [nid, [lx, ly]] of entries) {
      internal.push({
        kind: "circle",
        x: x + lx,
        y: centerY + ly,
        r: 0.02,
        fill: supernode.side === "a" ? "#4878a8" : "#c47a3d",
        highlight: false,
        ref: { type: "node", side: supernode.side, id: Number(nid) },
      });
    }
    for (const [u, v] of supernode.internal_edges) {
      const pu = local[String(u)];
      const pv = local[String(v)];
      if (!pu || !pv) continue;
      internal.push({
        kind: "line",
        x1: x + pu[0],
        y1: centerY + pu[1],
        x2: x + pv[0],
        y2: centerY + pv[1],
        width: 0.8,
        color: "#c9c9c9",
      });
    }
    if (entries.length) {
      internal.push({
        kind: "line",
        x1: x,
        y1: y,
        x2: x,
        y2: centerY,
        width: 0.5,
        color: "#dddddd",
      });
    }
  }

  // inter-edges: every (a-supernode, b-supernode) pair that shares members
  const interEdges: MembraneScene["interEdges"] = [];
  const aSide = state.filter((s) => s.side === "a");
  const bSide = state.filter((s) => s.side === "b");
  for (const sa of aSide) {
    const membersA = new Set(sa.members);
    for (const sb of bSide) {
      const shared = sb.members.filter((m) => membersA.has(m));
      if (!shared.length) continue;
      const [x1, y1] = position(sa.id);
      const [x2, y2] = position(sb.id);
      const highlighted =
        options.highlightedEdge !== null && options.highlightedEdge.a === sa.id && options.highlightedEdge.b === sb.id;
      interEdges.push({
        kind: "line",
        x1,
        y1,
        x2,
        y2,
        width: 0.5 + 2.5 * Math.min(1, shared.length / Math.max(sa.members.length, sb.members.length)),
        color: highlighted ? "#d2622a" : "#8899aa",
        ref: { type: "membrane-inter", a: sa.id, b: sb.id },
        weightRef: { a: sa.id, b: sb.id },
      });
    }
  }
  void bySide;
  return { ovals, interEdges, internal, gap: membrane.gap };
}

/** Shared members of a membrane inter-edge, for the item-table filter. */
export function membraneEdgeItems(merge: MergePayload, aId: number, bId: number): string[] {
  const a = merge.state.find((s) => s.id === aId);
  const b = merge.state.find((s) => s.id === bId);
  if (!a || !b) return [];
  const membersB = new Set(b.members);
  return a.members.filter((m) => membersB.has(m)).sort();
}
