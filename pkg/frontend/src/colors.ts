/** Color assignment: categories get palette slots alphabetically; numeric
 * values map onto a blue-to-yellow sequential ramp. */

export const QUALITATIVE = [
  "#4e79a7",
  "#f28e2b",
  "#59a14f",
  "#e15759",
  "#b07aa1",
  "#76b7b2",
  "#edc948",
  "#ff9da7",
  "#9c755f",
  "#bab0ac",
];

export function categoryColors(categories: Iterable<string>): Map<string, string> {
  const sorted = [...new Set(categories)].sort();
  const mapping = new Map<string, string>();
  sorted.forEach((cat, index) => mapping.set(cat, QUALITATIVE[index % QUALITATIVE.length]));
  return mapping;
}

/** t in [0,1] -> hex color, dark blue through teal to yellow. */
export function sequential(t: number): string {
  const clamped = Math.max(0, Math.min(1, t));
  const stops: [number, [number, number, number]][] = [
    [0.0, [33, 52, 121]],
    [0.5, [62, 153, 141]],
    [1.0, [243, 222, 44]],
  ];
  let lo = stops[0];
  let hi = stops[stops.length - 1];
  for (let i = 0; i + 1 < stops.length; i++) {
    if (clamped >= stops[i][0] && clamped <= stops[i + 1][0]) {
      lo = stops[i];
      hi = stops[i + 1];
      break;
    }
  }
  const span = hi[0] - lo[0] || 1;
  const f = (clamped - lo[0]) / span;
  const rgb = lo[1].map((c, i) => Math.round(c + f * (hi[1][i] - c)));
  return `#${rgb.map((c) => c.toString(16).padStart(2, "0")).join("")}`;
}
