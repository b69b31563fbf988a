/** Workspace state and actions. Every mutation goes through this store so
 * the control-panel behavior is testable without a DOM: exactly one PUT per
 * committed slider change, client-side motif filtering, cancel-and-replace
 * reads, and local-only drag overrides. */

import { ApiClient } from "./api.js";
import { layoutFrames, type PositionMap } from "./anim.js";
import { buildAdjacency, componentOf, shortestPath } from "./graph.js";
import { membraneEdgeItems } from "./scene.js";
import type {
  AlignmentsPayload,
  ItemEntry,
  LayoutPayload,
  ManualPairPayload,
  MappersPayload,
  MergePayload,
  MotifKind,
  PairPayload,
  ProjectionPayload,
  SessionSummary,
  Side,
} from "./types.js";
import type { Coloring } from "./scene.js";

export type Scheduler = (tick: () => void) => void;

const ANIMATION_FRAMES = 24;

export interface ItemTable {
  title: string;
  shared: ItemEntry[];
  only_a: ItemEntry[];
  only_b: ItemEntry[];
}

export class Workspace {
  api: ApiClient;
  scheduler: Scheduler;

  session: SessionSummary | null = null;
  mappers: MappersPayload | null = null;
  layoutPayload: LayoutPayload | null = null;
  alignments: AlignmentsPayload | null = null;
  projection: ProjectionPayload | null = null;

  lambdaPreview: number | null = null;
  coloring: Coloring = { mode: "categorical" };
  showOverlay = true;
  motifFilter: MotifKind | null = null;

  selectedPairId: number | null = null;
  manualPair: ManualPairPayload | null = null;
  highlightedItems = new Set<string>();
  highlightedPair: number | null = null;

  mergeStrategy: "conditional" | "raw" = "conditional";
  merge: MergePayload | null = null;
  mergeStep: number | null = null;
  membraneOverrides = new Map<number, [number, number]>();
  selectedMembraneEdge: { a: number; b: number } | null = null;

  itemTable: ItemTable | null = null;
  summary: { text: string; source: string } | null = null;

  private listeners = new Set<() => void>();
  private animationFrames: PositionMap[] = [];
  private animationIndex = 0;
  private animationToken = 0;
  private readGeneration = 0;

  constructor(api: ApiClient, scheduler: Scheduler = (tick) => setTimeout(tick, 16)) {
    this.api = api;
    this.scheduler = scheduler;
  }

  onChange(listener: () => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  async load(sessionId: string): Promise<void> {
    this.session = await this.api.session(sessionId);
    const [mappers, layout, alignments, projection] = await Promise.all([
      this.api.mappers(sessionId),
      this.api.layout(sessionId),
      this.api.alignments(sessionId),
      this.api.projection(sessionId),
    ]);
    this.mappers = mappers;
    this.layoutPayload = layout;
    this.alignments = alignments;
    this.projection = projection;
    this.lambdaPreview = layout.lambda;
    this.emit();
  }

  private get sid(): string {
    if (!this.session) throw new Error("workspace not loaded");
    return this.session.id;
  }

  // ---------------------------------------------------------- control panel

  /** Slider drag: UI-only preview, no network traffic. */
  previewLambda(value: number): void {
    this.lambdaPreview = value;
    this.emit();
  }

  /** Slider release: exactly one PUT, then an animated transition from the
   * previous layout to the returned one. */
  async commitLambda(value: number): Promise<void> {
    const before = this.layoutPayload;
    const after = await this.api.setLambda(this.sid, value);
    this.lambdaPreview = value;
    if (before) {
      this.animationFrames = layoutFrames(before, after, ANIMATION_FRAMES);
      this.animationIndex = 0;
      this.animationToken += 1;
      this.layoutPayload = after;
      this.pumpAnimation(this.animationToken);
    } else {
      this.layoutPayload = after;
    }
    this.emit();
  }

  private pumpAnimation(token: number): void {
    if (token !== this.animationToken) return; // superseded by a newer commit
    if (this.animationIndex >= this.animationFrames.length) {
      this.animationFrames = [];
      this.emit();
      return;
    }
    this.animationIndex += 1;
    this.emit();
    if (this.animationIndex < this.animationFrames.length) {
      this.scheduler(() => this.pumpAnimation(token));
    } else {
      this.animationFrames = [];
    }
  }

  get animating(): boolean {
    return this.animationFrames.length > 0;
  }

  /** Positions to draw right now: mid-animation frame or the settled layout. */
  currentPositions(): PositionMap | null {
    if (this.animationFrames.length && this.animationIndex > 0) {
      return this.animationFrames[Math.min(this.animationIndex - 1, this.animationFrames.length - 1)];
    }
    return this.layoutPayload ? this.layoutPayload.positions : null;
  }

  async setAlignmentParams(params: Record<string, unknown>): Promise<void> {
    this.alignments = await this.api.setAlignmentParams(this.sid, params);
    this.selectedPairId = null;
    this.merge = null;
    this.itemTable = null;
    this.highlightedPair = null;
    this.highlightedItems.clear();
    this.emit();
  }

  setMotifFilter(kind: MotifKind | null): void {
    this.motifFilter = kind;
    this.emit();
  }

  /** Client-side glyph filter over the discovered pairs. */
  visiblePairs(): PairPayload[] {
    const pairs = this.alignments?.pairs ?? [];
    if (!this.motifFilter) return pairs;
    return pairs.filter((p) => p.motif?.kind === this.motifFilter);
  }

  setColoring(coloring: Coloring): void {
    this.coloring = coloring;
    this.emit();
  }

  toggleOverlay(): void {
    this.showOverlay = !this.showOverlay;
    this.emit();
  }

  hoverBubble(pairId: number | null): void {
    this.highlightedPair = pairId;
    this.highlightedItems.clear();
    if (pairId !== null) {
      const pair = this.alignments?.pairs.find((p) => p.id === pairId);
      if (pair && this.mappers) {
        for (const nid of pair.nodes_a) {
          for (const item of this.mappers.a.nodes[nid]?.members ?? []) this.highlightedItems.add(item);
        }
        for (const nid of pair.nodes_b) {
          for (const item of this.mappers.b.nodes[nid]?.members ?? []) this.highlightedItems.add(item);
        }
      }
    }
    this.emit();
  }

  /** Linked highlighting: one item lights up in every view that shows it. */
  highlightItem(item: string | null): void {
    this.highlightedItems.clear();
    if (item !== null) this.highlightedItems.add(item);
    this.emit();
  }

  // ------------------------------------------------------------- selection

  async selectPair(pairId: number): Promise<void> {
    this.selectedPairId = pairId;
    this.manualPair = null;
    this.membraneOverrides.clear();
    this.selectedMembraneEdge = null;
    this.mergeStep = null;
    await this.loadMerge();
    await this.loadItems(`pair:${pairId}`, `pair ${pairId}`);
    this.hoverBubble(pairId);
  }

  async selectInterEdge(a: number, b: number): Promise<void> {
    await this.loadItems(`inter:${a}:${b}`, `inter-edge a:${a} - b:${b}`);
    this.highlightedItems = new Set(this.itemTable?.shared.map((entry) => entry.id) ?? []);
    this.emit();
  }

  async selectNode(side: Side, nodeId: number): Promise<void> {
    await this.loadItems(`node:${side}:${nodeId}`, `node ${side}:${nodeId}`);
  }

  private async loadItems(selector: string, title: string): Promise<void> {
    const generation = ++this.readGeneration;  // cancel-and-replace
    const payload = await this.api.items(this.sid, selector);
    if (generation !== this.readGeneration) return;
    this.itemTable = { title, shared: payload.shared, only_a: payload.only_a, only_b: payload.only_b };
    this.emit();
  }

  /** Manual structure: selected nodes, server finds and scores counterpart. */
  async manualSelect(side: Side, nodeIds: number[]): Promise<ManualPairPayload> {
    const pair = await this.api.manualPair(this.sid, side, nodeIds);
    this.manualPair = pair;
    this.selectedPairId = null;
    this.merge = null;
    this.highlightedItems = new Set<string>();
    if (this.mappers) {
      const graphs = { a: this.mappers.a, b: this.mappers.b };
      for (const s of ["a", "b"] as Side[]) {
        for (const nid of s === "a" ? pair.nodes_a : pair.nodes_b) {
          for (const item of graphs[s].nodes[nid]?.members ?? []) this.highlightedItems.add(item);
        }
      }
    }
    this.emit();
    return pair;
  }

  expandComponent(side: Side, nodeId: number): number[] {
    if (!this.mappers) return [];
    const graph = side === "a" ? this.mappers.a : this.mappers.b;
    return componentOf(nodeId, buildAdjacency(graph.nodes.map((n) => n.id), graph.edges));
  }

  pathBetween(side: Side, from: number, to: number): number[] {
    if (!this.mappers) return [];
    const graph = side === "a" ? this.mappers.a : this.mappers.b;
    return shortestPath(from, to, buildAdjacency(graph.nodes.map((n) => n.id), graph.edges));
  }

  // ----------------------------------------------------------- detail panel

  async setMergeStrategy(strategy: "conditional" | "raw"): Promise<void> {
    this.mergeStrategy = strategy;
    this.mergeStep = null;
    await this.loadMerge();
  }

  /** Merge slider: replay the sequence to `step` (server reconstructs). */
  async setMergeStep(step: number): Promise<void> {
    this.mergeStep = step;
    await this.loadMerge();
  }

  private async loadMerge(): Promise<void> {
    if (this.selectedPairId === null) return;
    const generation = ++this.readGeneration;
    const payload = await this.api.merge(
      this.sid,
      this.selectedPairId,
      this.mergeStrategy,
      this.mergeStep ?? undefined,
    );
    if (generation !== this.readGeneration) return;
    this.merge = payload;
    this.mergeStep = payload.step;
    this.membraneOverrides.clear();
    this.selectedMembraneEdge = null;
    this.emit();
  }

  get mergeStepMax(): number {
    return this.merge?.sequence.steps.length ?? 0;
  }

  /** Drag adjusts local positions only; nothing is written to the server. */
  dragSupernode(id: number, x: number, y: number): void {
    this.membraneOverrides.set(id, [x, y]);
    this.emit();
  }

  /** Membrane inter-edge click: filter the table to the edge's shared items. */
  selectMembraneEdge(a: number, b: number): void {
    if (!this.merge) return;
    this.selectedMembraneEdge = { a, b };
    const shared = membraneEdgeItems(this.merge, a, b);
    const entry = (id: string): ItemEntry => ({ id, label: null, text: null });
    const fromTable = new Map<string, ItemEntry>();
    for (const group of [this.itemTable?.shared, this.itemTable?.only_a, this.itemTable?.only_b]) {
      for (const item of group ?? []) fromTable.set(item.id, item);
    }
    this.itemTable = {
      title: `membrane edge ${a} - ${b}`,
      shared: shared.map((id) => fromTable.get(id) ?? entry(id)),
      only_a: [],
      only_b: [],
    };
    this.highlightedItems = new Set(shared);
    this.emit();
  }

  async summarizeItems(ids: string[]): Promise<void> {
    const payload = await this.api.summarize(this.sid, ids);
    this.summary = { text: payload.summary, source: payload.source };
    this.emit();
  }
}
