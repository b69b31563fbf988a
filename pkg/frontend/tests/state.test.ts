/** Smoke behavior of the workspace against recorded live-session payloads:
 * slider commits are a single PUT with animated transitions, glyph filtering
 * is client-side, the merge slider replays endpoint states, and inter-edge
 * clicks filter the item table. */

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { Workspace } from "../src/state.js";
import { FakeServer, ManualScheduler, SESSION_ID, fixture } from "./helpers.js";

let server: FakeServer;
let scheduler: ManualScheduler;
let workspace: Workspace;

beforeEach(async () => {
  server = new FakeServer();
  scheduler = new ManualScheduler();
  workspace = new Workspace(new ApiClient("", server.fetch), scheduler.schedule);
  await workspace.load(SESSION_ID);
});

describe("lambda slider", () => {
  it("previewing never talks to the server; committing PUTs exactly once", async () => {
    workspace.previewLambda(0.2);
    workspace.previewLambda(0.35);
    workspace.previewLambda(0.5);
    expect(server.callsTo("PUT", `/sessions/${SESSION_ID}/lambda`)).toHaveLength(0);

    await workspace.commitLambda(0.5);
    scheduler.pump();
    expect(server.callsTo("PUT", `/sessions/${SESSION_ID}/lambda`)).toHaveLength(1);
    expect(server.callsTo("PUT", `/sessions/${SESSION_ID}/lambda`)[0].body).toEqual({ lambda: 0.5 });
  });

  it("animates through interpolated frames between the two endpoint layouts", async () => {
    const before = fixture("get_layout");
    const after = fixture("put_lambda_0.5");
    const nodeId = Object.keys(before.positions.a)[0];
    const start = before.positions.a[nodeId];
    const target = after.positions.a[nodeId];

    const samples: [number, number][] = [];
    workspace.onChange(() => {
      const positions = workspace.currentPositions();
      if (positions) samples.push([...positions.a[nodeId]] as [number, number]);
    });
    await workspace.commitLambda(0.5);
    while (scheduler.step()) {
      /* run the animation to completion, one frame per tick */
    }

    expect(samples.length).toBeGreaterThan(2);
    const first = samples[0];
    const last = samples[samples.length - 1];
    expect(first[0]).toBeCloseTo(start[0], 9);
    expect(first[1]).toBeCloseTo(start[1], 9);
    expect(last[0]).toBeCloseTo(target[0], 9);
    expect(last[1]).toBeCloseTo(target[1], 9);
    // some middle frame sits strictly between the endpoints
    const middle = samples[Math.floor(samples.length / 2)];
    const dStart = Math.hypot(middle[0] - start[0], middle[1] - start[1]);
    const dEnd = Math.hypot(middle[0] - target[0], middle[1] - target[1]);
    const total = Math.hypot(target[0] - start[0], target[1] - start[1]);
    if (total > 1e-9) {
      expect(dStart).toBeGreaterThan(0);
      expect(dEnd).toBeGreaterThan(0);
    }
    expect(workspace.animating).toBe(false);
    // the settled layout is the server's, untouched
    expect(workspace.layoutPayload?.positions.a[nodeId]).toEqual(target);
  });
});

describe("rapid lambda commits", () => {
  it("a newer commit supersedes a still-running animation", async () => {
    await workspace.commitLambda(0.5);
    scheduler.step(); // first animation underway
    server.route("PUT", `/sessions/${SESSION_ID}/lambda`, fixture("get_layout"));
    await workspace.commitLambda(1.0); // supersedes mid-flight
    while (scheduler.step()) {
      /* drain both scheduled pumps */
    }
    expect(workspace.animating).toBe(false);
    const target = fixture("get_layout");
    const nodeId = Object.keys(target.positions.a)[0];
    expect(workspace.currentPositions()!.a[nodeId]).toEqual(target.positions.a[nodeId]);
  });
});

describe("motif glyph filter", () => {
  it("reduces the pair list to the matching subset, preserving order", () => {
    const all = workspace.visiblePairs();
    const kinds = new Set(all.map((p) => p.motif?.kind));
    expect(kinds.size).toBeGreaterThan(1); // demo data exposes several patterns

    workspace.setMotifFilter("fan_out");
    const filtered = workspace.visiblePairs();
    expect(filtered.length).toBeGreaterThan(0);
    expect(filtered.length).toBeLessThan(all.length);
    expect(filtered.every((p) => p.motif?.kind === "fan_out")).toBe(true);
    const allIds = all.map((p) => p.id);
    const filteredIds = filtered.map((p) => p.id);
    expect(filteredIds).toEqual(allIds.filter((id) => filteredIds.includes(id)));

    workspace.setMotifFilter(null);
    expect(workspace.visiblePairs()).toHaveLength(all.length);
  });
});

describe("merge slider", () => {
  it("renders the initial state at step 0 and the final state at step max", async () => {
    const full = fixture("get_merge_full");
    const step0 = fixture("get_merge_step0");
    await workspace.selectPair(full.pair_id);
    expect(workspace.merge?.step).toBe(full.sequence.steps.length);
    expect(workspace.merge?.state).toHaveLength(full.state.length);

    await workspace.setMergeStep(0);
    expect(workspace.merge?.step).toBe(0);
    expect(workspace.merge?.state).toHaveLength(step0.state.length);
    // one supernode per original mapper node before any merge
    const pair = fixture("get_alignments").pairs.find((p: any) => p.id === full.pair_id);
    expect(step0.state.length).toBe(pair.nodes_a.length + pair.nodes_b.length);

    await workspace.setMergeStep(full.sequence.steps.length);
    expect(workspace.merge?.step).toBe(full.sequence.steps.length);
    expect(workspace.merge?.state.map((s: any) => s.id).sort()).toEqual(
      full.state.map((s: any) => s.id).sort(),
    );
  });

  it("keeps supernode drags local", async () => {
    const full = fixture("get_merge_full");
    await workspace.selectPair(full.pair_id);
    const before = server.calls.length;
    workspace.dragSupernode(full.state[0].id, 3.25, 0.0);
    expect(workspace.membraneOverrides.get(full.state[0].id)).toEqual([3.25, 0.0]);
    expect(server.calls.length).toBe(before); // no API mutation
  });
});

describe("item table", () => {
  it("inter-edge click filters the table to exactly that edge's shared items", async () => {
    const itemsInter = fixture("get_items_inter");
    const [, a, b] = itemsInter.selector.split(":");
    await workspace.selectInterEdge(Number(a), Number(b));
    expect(workspace.itemTable?.title).toContain(`a:${a}`);
    const sharedIds = workspace.itemTable!.shared.map((entry) => entry.id);
    // the mappers payload's edge record agrees
    const edge = fixture("get_mappers").inter_edges.find(
      (e: any) => e.a === Number(a) && e.b === Number(b),
    );
    expect(sharedIds).toEqual([...edge.shared].sort());
    // and the same items are highlighted everywhere
    for (const id of sharedIds) expect(workspace.highlightedItems.has(id)).toBe(true);
  });

  it("membrane inter-edge click filters to the supernode pair's shared members", async () => {
    const full = fixture("get_merge_full");
    await workspace.selectPair(full.pair_id);
    const aSide = full.state.filter((s: any) => s.side === "a");
    const bSide = full.state.filter((s: any) => s.side === "b");
    const expected = aSide[0].members.filter((m: string) => bSide[0].members.includes(m)).sort();
    expect(expected.length).toBeGreaterThan(0);
    workspace.selectMembraneEdge(aSide[0].id, bSide[0].id);
    expect(workspace.itemTable?.shared.map((entry) => entry.id)).toEqual(expected);
  });

  it("summaries come from the summarize endpoint verbatim", async () => {
    await workspace.summarizeItems(["w0001", "w0002"]);
    const recorded = fixture("post_summarize");
    expect(workspace.summary).toEqual({ text: recorded.summary, source: recorded.source });
  });
});

describe("manual alignment selection", () => {
  it("expands components and shortest paths client-side", () => {
    const mappers = fixture("get_mappers");
    const [u, v] = mappers.a.edges[0];
    const component = workspace.expandComponent("a", u);
    expect(component).toContain(u);
    expect(component).toContain(v);
    const path = workspace.pathBetween("a", u, v);
    expect(path).toEqual([u, v]);
    expect(workspace.pathBetween("a", u, u)).toEqual([u]);
  });

  it("posts the selection and keeps the scored counterpart", async () => {
    server.route("POST", `/sessions/${SESSION_ID}/manual-pair`, {
      id: null,
      manual: true,
      nodes_a: [0, 1],
      nodes_b: [2],
      content_jaccard: 0.4,
      coherence: 0.1,
      motif: { kind: "one_to_one", meta_components: [[1, 1, 12]] },
    });
    const pair = await workspace.manualSelect("a", [0, 1]);
    expect(pair.nodes_b).toEqual([2]);
    const posts = server.callsTo("POST", `/sessions/${SESSION_ID}/manual-pair`);
    expect(posts).toHaveLength(1);
    expect(posts[0].body).toEqual({ side: "a", nodes: [0, 1] });
    expect(workspace.manualPair?.motif?.kind).toBe("one_to_one");
  });
});
