/** Live smoke: spawns the real server on an ephemeral port, drives the
 * workspace flows over actual HTTP, then shuts it down.
 *
 * Opt-in because it needs the Python package installed:
 *
 *     MAPALIGN_LIVE=1 npm test
 */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient, type FetchLike } from "../src/api.js";
import { Workspace } from "../src/state.js";
import { ManualScheduler } from "./helpers.js";

const LIVE = process.env.MAPALIGN_LIVE === "1";
const PYTHON = process.env.MAPALIGN_PYTHON ?? "python3";

let server: ChildProcess | null = null;
let base = "";
let sessionId = "";

async function waitForServer(proc: ChildProcess): Promise<{ port: number; session: string }> {
  return new Promise((resolve, reject) => {
    let buffer = "";
    const timer = setTimeout(() => reject(new Error(`server never announced itself:\n${buffer}`)), 90_000);
    proc.stdout!.on("data", (chunk: Buffer) => {
      buffer += chunk.toString();
      const portMatch = buffer.match(/listening on http:\/\/[\d.]+:(\d+)/);
      const sessionMatch = buffer.match(/default session: (\w+)/);
      if (portMatch && sessionMatch) {
        clearTimeout(timer);
        resolve({ port: Number(portMatch[1]), session: sessionMatch[1] });
      }
    });
    proc.on("exit", (code) => reject(new Error(`server exited early (${code}):\n${buffer}`)));
  });
}

describe.skipIf(!LIVE)("live demo session", () => {
  beforeAll(async () => {
    const dir = mkdtempSync(join(tmpdir(), "mapalign-live-"));
    const demo = spawnSync(PYTHON, ["-m", "mapalign.cli", "demo", "--out", dir], { encoding: "utf-8" });
    expect(demo.status, demo.stderr).toBe(0);
    server = spawn(PYTHON, ["-m", "mapalign.cli", "serve", "--config", join(dir, "demo-config.json"), "--port", "0"]);
    const { port, session } = await waitForServer(server);
    base = `http://127.0.0.1:${port}`;
    sessionId = session;
  }, 120_000);

  afterAll(() => {
    server?.kill("SIGTERM");
  });

  it("drives the smoke flows over real HTTP", async () => {
    let lambdaPuts = 0;
    const counting: FetchLike = async (url, init) => {
      if ((init?.method ?? "GET") === "PUT" && url.includes("/lambda")) lambdaPuts += 1;
      return fetch(url, init);
    };
    const scheduler = new ManualScheduler();
    const workspace = new Workspace(new ApiClient(base, counting), scheduler.schedule);
    await workspace.load(sessionId);
    expect(workspace.mappers!.a.nodes.length).toBeGreaterThan(0);
    expect(workspace.alignments!.pairs.length).toBeGreaterThan(0);

    // lambda slider: previews are free, the commit is one PUT with animation
    workspace.previewLambda(0.2);
    workspace.previewLambda(0.8);
    const before = workspace.currentPositions()!;
    await workspace.commitLambda(0.5);
    let frames = 0;
    while (scheduler.step()) frames += 1;
    expect(lambdaPuts).toBe(1);
    expect(frames).toBeGreaterThan(1);
    const after = workspace.layoutPayload!;
    expect(after.lambda).toBe(0.5);
    const nodeId = Object.keys(before.a)[0];
    expect(workspace.currentPositions()!.a[nodeId]).toEqual(after.positions.a[nodeId]);

    // motif glyph filter reduces the pair list client-side
    const all = workspace.visiblePairs();
    const kinds = [...new Set(all.map((p) => p.motif!.kind))];
    expect(kinds.length).toBeGreaterThan(1);
    workspace.setMotifFilter(kinds[0] as any);
    const filtered = workspace.visiblePairs();
    expect(filtered.length).toBeGreaterThan(0);
    expect(filtered.length).toBeLessThan(all.length);
    workspace.setMotifFilter(null);

    // merge slider endpoints render the initial and final states
    const pair = all[0];
    await workspace.selectPair(pair.id);
    const maxStep = workspace.mergeStepMax;
    await workspace.setMergeStep(0);
    expect(workspace.merge!.state.length).toBe(pair.nodes_a.length + pair.nodes_b.length);
    await workspace.setMergeStep(maxStep);
    const finalCount = workspace.merge!.state.length;
    expect(finalCount).toBeLessThanOrEqual(pair.nodes_a.length + pair.nodes_b.length);
    expect(workspace.merge!.step).toBe(maxStep);

    // inter-edge click filters the item table to exactly that edge's items
    const edge = workspace.mappers!.inter_edges[0];
    await workspace.selectInterEdge(edge.a, edge.b);
    expect(workspace.itemTable!.shared.map((entry) => entry.id)).toEqual([...edge.shared].sort());
  }, 120_000);
});
