/** Canvas renderer: world-coordinate marks in, pixels out. Keeps a record of
 * hit targets so the main module can resolve clicks back to refs. */

import type { Mark, MembraneScene } from "./scene.js";

export interface Viewport {
  minX: number;
  minY: number;
  maxX: number;
  maxY: number;
}

export interface HitTarget {
  x: number;
  y: number;
  r: number;
  ref: NonNullable<Mark extends { ref?: infer R } ? R : never> | Record<string, unknown>;
}

export function fitViewport(points: Iterable<[number, number]>, pad = 0.08): Viewport {
  let minX = Infinity;
  let minY = Infinity;
  let maxX = -Infinity;
  let maxY = -Infinity;
  for (const [x, y] of points) {
    minX = Math.min(minX, x);
    minY = Math.min(minY, y);
    maxX = Math.max(maxX, x);
    maxY = Math.max(maxY, y);
  }
  if (!isFinite(minX)) return { minX: 0, minY: 0, maxX: 1, maxY: 1 };
  const spanX = maxX - minX || 1;
  const spanY = maxY - minY || 1;
  return {
    minX: minX - pad * spanX,
    minY: minY - pad * spanY,
    maxX: maxX + pad * spanX,
    maxY: maxY + pad * spanY,
  };
}

export class CanvasPanel {
  canvas: HTMLCanvasElement;
  ctx: CanvasRenderingContext2D;
  viewport: Viewport = { minX: 0, minY: 0, maxX: 1, maxY: 1 };
  hits: HitTarget[] = [];

  constructor(canvas: HTMLCanvasElement) {
    this.canvas = canvas;
    this.ctx = canvas.getContext("2d")!;
  }

  private scale(): number {
    const { minX, minY, maxX, maxY } = this.viewport;
    return Math.min(this.canvas.width / (maxX - minX), this.canvas.height / (maxY - minY));
  }

  toPixel(x: number, y: number): [number, number] {
    const s = this.scale();
    return [(x - this.viewport.minX) * s, this.canvas.height - (y - this.viewport.minY) * s];
  }

  toWorld(px: number, py: number): [number, number] {
    const s = this.scale();
    return [px / s + this.viewport.minX, (this.canvas.height - py) / s + this.viewport.minY];
  }

  clear(): void {
    this.ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    this.hits = [];
  }

  draw(marks: Mark[]): void {
    const ctx = this.ctx;
    const s = this.scale();
    for (const mark of marks) {
      if (mark.kind === "polygon") {
        if (mark.points.length < 3) continue;
        ctx.beginPath();
        const [x0, y0] = this.toPixel(mark.points[0][0], mark.points[0][1]);
        ctx.moveTo(x0, y0);
        for (const [x, y] of mark.points.slice(1)) {
          const [px, py] = this.toPixel(x, y);
          ctx.lineTo(px, py);
        }
        ctx.closePath();
        ctx.fillStyle = `rgba(110, 110, 110, ${mark.fillOpacity})`;
        ctx.fill();
        ctx.strokeStyle = mark.highlight ? "#d2622a" : mark.stroke;
        ctx.lineWidth = mark.highlight ? 2 : 1;
        ctx.stroke();
      } else if (mark.kind === "line") {
        const [x1, y1] = this.toPixel(mark.x1, mark.y1);
        const [x2, y2] = this.toPixel(mark.x2, mark.y2);
        ctx.beginPath();
        ctx.moveTo(x1, y1);
        ctx.lineTo(x2, y2);
        ctx.strokeStyle = mark.color;
        ctx.lineWidth = mark.width;
        ctx.stroke();
        if (mark.ref) {
          this.hits.push({ x: (mark.x1 + mark.x2) / 2, y: (mark.y1 + mark.y2) / 2, r: 0.04, ref: mark.ref });
        }
      } else if (mark.kind === "circle") {
        const [px, py] = this.toPixel(mark.x, mark.y);
        ctx.beginPath();
        ctx.arc(px, py, Math.max(1.5, mark.r * s), 0, Math.PI * 2);
        ctx.fillStyle = mark.fill;
        ctx.fill();
        if (mark.highlight) {
          ctx.strokeStyle = "#d2622a";
          ctx.lineWidth = 2;
          ctx.stroke();
        }
        this.hits.push({ x: mark.x, y: mark.y, r: Math.max(mark.r, 0.02), ref: mark.ref });
      } else if (mark.kind === "pie") {
        const [px, py] = this.toPixel(mark.x, mark.y);
        const radius = Math.max(2, mark.r * s);
        let angle = -Math.PI / 2;
        for (const slice of mark.slices) {
          const sweep = slice.fraction * Math.PI * 2;
          ctx.beginPath();
          ctx.moveTo(px, py);
          ctx.arc(px, py, radius, angle, angle + sweep);
          ctx.closePath();
          ctx.fillStyle = slice.color;
          ctx.fill();
          angle += sweep;
        }
        ctx.beginPath();
        ctx.arc(px, py, radius, 0, Math.PI * 2);
        ctx.strokeStyle = mark.highlight ? "#d2622a" : "#555555";
        ctx.lineWidth = mark.highlight ? 2.5 : 0.7;
        ctx.stroke();
        this.hits.push({ x: mark.x, y: mark.y, r: Math.max(mark.r, 0.02), ref: mark.ref });
      }
    }
  }

  hitTest(px: number, py: number): HitTarget | null {
    const [wx, wy] = this.toWorld(px, py);
    let best: HitTarget | null = null;
    let bestDist = Infinity;
    for (const hit of this.hits) {
      const d = Math.hypot(hit.x - wx, hit.y - wy);
      if (d <= hit.r * 1.5 && d < bestDist) {
        best = hit;
        bestDist = d;
      }
    }
    return best;
  }
}

export function drawMembrane(panel: CanvasPanel, scene: MembraneScene): void {
  const marks: Mark[] = [];
  for (const edge of scene.interEdges) marks.push(edge);
  for (const oval of scene.ovals) {
    marks.push({
      kind: "circle",
      x: oval.x,
      y: oval.y,
      r: oval.r,
      fill: oval.side === "a" ? "rgba(72, 120, 168, 0.25)" : "rgba(196, 122, 61, 0.25)",
      highlight: false,
      ref: { type: "supernode", side: oval.side, id: oval.id },
    });
  }
  marks.push(...scene.internal);
  panel.draw(marks);
}
