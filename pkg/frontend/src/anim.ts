/** Interpolation between two server layouts; the server returns endpoints
 * and the client animates through the frames in between. */

import type { LayoutPayload, Side } from "./types.js";

export type PositionMap = Record<Side, Record<string, [number, number]>>;

function lerp(a: number, b: number, t: number): number {
  return a + (b - a) * t;
}

/** Smoothstep easing keeps the slider animation gentle at both ends. */
export function ease(t: number): number {
  return t * t * (3 - 2 * t);
}

export function interpolatePositions(from: PositionMap, to: PositionMap, t: number): PositionMap {
  const eased = ease(Math.max(0, Math.min(1, t)));
  const out: PositionMap = { a: {}, b: {} };
  for (const side of ["a", "b"] as Side[]) {
    for (const [id, target] of Object.entries(to[side])) {
      const source = from[side][id] ?? target;
      out[side][id] = [lerp(source[0], target[0], eased), lerp(source[1], target[1], eased)];
    }
  }
  return out;
}

export function layoutFrames(from: LayoutPayload, to: LayoutPayload, count: number): PositionMap[] {
  const frames: PositionMap[] = [];
  for (let i = 0; i < count; i++) {
    const t = count === 1 ? 1 : i / (count - 1);
    frames.push(interpolatePositions(from.positions, to.positions, t));
  }
  return frames;
}
