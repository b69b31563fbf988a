/** Fixture-backed fake fetch. Fixtures are recorded from the real service
 * (scripts/update_goldens.py in the repo root), so these tests exercise the
 * actual wire contract of a live demo session. */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";

const FIXTURE_DIR = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function fixture<T = any>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURE_DIR, `${name}.json`), "utf-8"));
}

export const SESSION_ID: string = fixture("get_session").id;

export interface RecordedCall {
  method: string;
  path: string;
  body: unknown;
}

export class FakeServer {
  calls: RecordedCall[] = [];
  routes = new Map<string, unknown>();

  constructor() {
    const sid = SESSION_ID;
    this.route("GET", `/sessions/${sid}`, fixture("get_session"));
    this.route("GET", `/sessions/${sid}/mappers`, fixture("get_mappers"));
    this.route("GET", `/sessions/${sid}/layout`, fixture("get_layout"));
    this.route("PUT", `/sessions/${sid}/lambda`, fixture("put_lambda_0.5"));
    this.route("GET", `/sessions/${sid}/alignments`, fixture("get_alignments"));
    this.route("GET", `/sessions/${sid}/projection`, fixture("get_projection"));
    const merge = fixture("get_merge_full");
    const pid = merge.pair_id;
    this.route("GET", `/sessions/${sid}/alignments/${pid}/merge?strategy=conditional`, merge);
    this.route(
      "GET",
      `/sessions/${sid}/alignments/${pid}/merge?strategy=conditional&step=${merge.sequence.steps.length}`,
      merge,
    );
    this.route("GET", `/sessions/${sid}/alignments/${pid}/merge?strategy=conditional&step=0`, fixture("get_merge_step0"));
    const itemsPair = fixture("get_items_pair0");
    this.route("GET", `/sessions/${sid}/items?selector=${encodeURIComponent(itemsPair.selector)}`, itemsPair);
    const itemsInter = fixture("get_items_inter");
    this.route("GET", `/sessions/${sid}/items?selector=${encodeURIComponent(itemsInter.selector)}`, itemsInter);
    this.route("POST", `/sessions/${sid}/summarize`, fixture("post_summarize"));
  }

  route(method: string, path: string, payload: unknown): void {
    this.routes.set(`${method} ${path}`, payload);
  }

  callsTo(method: string, pathPrefix: string): RecordedCall[] {
    return this.calls.filter((c) => c.method === method && c.path.startsWith(pathPrefix));
  }

  fetch: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    const body = init?.body ? JSON.parse(init.body as string) : undefined;
    this.calls.push({ method, path, body });
    const payload = this.routes.get(`${method} ${path}`);
    if (payload === undefined) {
      return new Response(JSON.stringify({ code: "not-routed", message: `no fixture for ${method} ${path}` }), {
        status: 404,
        headers: { "content-type": "application/json" },
      });
    }
    return new Response(JSON.stringify(payload), { status: 200, headers: { "content-type": "application/json" } });
  };
}

/** Deterministic manual scheduler: ticks run only when pump() is called. */
export class ManualScheduler {
  queue: (() => void)[] = [];

  schedule = (tick: () => void): void => {
    this.queue.push(tick);
  };

  pump(): number {
    let ran = 0;
    while (this.queue.length) {
      this.queue.shift()!();
      ran += 1;
    }
    return ran;
  }

  step(): boolean {
    const tick = this.queue.shift();
    if (tick) tick();
    return Boolean(tick);
  }
}
