/** Client-side graph helpers for manual structure selection: adjacency,
 * connected-component expansion, and unweighted shortest paths. */

export type Adjacency = Map<number, Set<number>>;

export function buildAdjacency(nodeIds: number[], edges: [number, number, number][]): Adjacency {
  const adjacency: Adjacency = new Map(nodeIds.map((id) => [id, new Set<number>()]));
  for (const [u, v] of edges) {
    adjacency.get(u)?.add(v);
    adjacency.get(v)?.add(u);
  }
  return adjacency;
}

export function componentOf(start: number, adjacency: Adjacency): number[] {
  if (!adjacency.has(start)) return [];
  const seen = new Set<number>([start]);
  const queue = [start];
  while (queue.length) {
    const node = queue.shift()!;
    for (const next of adjacency.get(node) ?? []) {
      if (!seen.has(next)) {
        seen.add(next);
        queue.push(next);
      }
    }
  }
  return [...seen].sort((x, y) => x - y);
}

/** BFS shortest path by hop count; empty when unreachable. */
export function shortestPath(from: number, to: number, adjacency: Adjacency): number[] {
  if (!adjacency.has(from) || !adjacency.has(to)) return [];
  if (from === to) return [from];
  const previous = new Map<number, number>();
  const seen = new Set<number>([from]);
  const queue = [from];
  while (queue.length) {
    const node = queue.shift()!;
    for (const next of [...(adjacency.get(node) ?? [])].sort((x, y) => x - y)) {
      if (seen.has(next)) continue;
      seen.add(next);
      previous.set(next, node);
      if (next === to) {
        const path = [to];
        let cursor = to;
        while (cursor !== from) {
          cursor = previous.get(cursor)!;
          path.push(cursor);
        }
        return path.reverse();
      }
      queue.push(next);
    }
  }
  return [];
}
