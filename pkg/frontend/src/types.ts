/** Wire types for the session API payloads. */

export interface MapperNodePayload {
  id: number;
  interval: number;
  range: [number, number];
  members: string[];
}

export interface MapperGraphPayload {
  nodes: MapperNodePayload[];
  edges: [number, number, number][];
  params: Record<string, unknown>;
}

export interface InterEdgePayload {
  a: number;
  b: number;
  w: number;
  shared: string[];
}

export interface MappersPayload {
  a: MapperGraphPayload;
  b: MapperGraphPayload;
  inter_edges: InterEdgePayload[];
  uncovered: { a: string[]; b: string[] };
}

export interface LayoutPayload {
  positions: { a: Record<string, [number, number]>; b: Record<string, [number, number]> };
  offsets: Record<string, [number, number]>;
  final_energy: number;
  energy_trace: number[];
  lambda: number;
  seed: number;
}

export type MotifKind = "one_to_one" | "fan_out" | "fan_in" | "crossing" | "vanishing_appearance";

export interface MotifPayload {
  kind: MotifKind;
  meta_components: [number, number, number][];
}

export interface PairPayload {
  id: number;
  nodes_a: number[];
  nodes_b: number[];
  content_jaccard: number;
  coherence: number;
  motif: MotifPayload | null;
}

export interface BubblePayload {
  pair_id: number;
  side: "a" | "b";
  polygon?: [number, number][];
  content_jaccard?: number;
  coherence?: number;
  empty?: boolean;
}

export interface AlignmentsPayload {
  seed: number;
  weights: { alpha: number; beta: number; gamma: number; scale_inter_by_jaccard: boolean };
  k: number | null;
  tau: number;
  eigenvalues: number[];
  pairs: PairPayload[];
  bubbles: BubblePayload[];
}

export interface SupernodePayload {
  id: number;
  side: "a" | "b";
  members: string[];
  constituents: number[];
  internal_edges: [number, number][];
}

export interface MembranePayload {
  gap: number;
  supernode_positions: Record<string, [number, number]>;
  internal_layouts: Record<string, Record<string, [number, number]>>;
  oval_radii: Record<string, number>;
}

export interface MergePayload {
  pair_id: number;
  seed: number;
  sequence: {
    strategy: string;
    steps: { side: "a" | "b"; merged: number[]; new_id: number; H_after: number }[];
    final_H: number;
  };
  initial_H: number;
  step: number;
  state: SupernodePayload[];
  membrane: MembranePayload;
}

export interface ItemEntry {
  id: string;
  label: string | null;
  text: string | null;
}

export interface ItemsPayload {
  selector: string;
  shared: ItemEntry[];
  only_a: ItemEntry[];
  only_b: ItemEntry[];
}

export interface ProjectionPayload {
  a: Record<string, [number, number]>;
  b: Record<string, [number, number]>;
  labels: Record<string, string>;
  numeric_attrs: Record<string, Record<string, number>>;
}

export interface SessionSummary {
  id: string;
  seed: number;
  warnings: string[];
  n_shared: number;
  sets: { a: string; b: string };
  mapper_params: Record<string, Record<string, unknown>>;
  layout_params: Record<string, unknown>;
  graph_sizes: { a: { nodes: number; edges: number }; b: { nodes: number; edges: number } };
  inter_edge_count: number;
  current_lambda: number;
}

export interface ManualPairPayload extends Omit<PairPayload, "id"> {
  id: null;
  manual: true;
}

export interface SummaryPayload {
  summary: string;
  source: "external" | "fallback";
}

export type Side = "a" | "b";
