/** Canvas scatter plot able to animate between corpus frames.
 *
 * Everything is drawn in one immediate-mode pass per frame (no DOM node per
 * point), which stays interactive into the tens of thousands of points.
 * Transitions run over TRANSITION_MS with cubic ease-in-out: shared
 * concepts glide along their trajectory lines, departed concepts fade out
 * in place, new concepts fade in at their destination.
 */

import { TRANSITION_MS, easeInOut, type TransitionPlan } from "../viewmodel/browse.js";

export interface ScatterDatum {
  id: string;
  x: number;
  y: number;
  group: string;
  term: string;
}

interface Bounds {
  minX: number;
  maxX: number;
  minY: number;
  maxY: number;
}

function boundsOf(points: Iterable<{ x: number; y: number }>): Bounds {
  const b: Bounds = { minX: Infinity, maxX: -Infinity, minY: Infinity, maxY: -Infinity };
  for (const p of points) {
    b.minX = Math.min(b.minX, p.x);
    b.maxX = Math.max(b.maxX, p.x);
    b.minY = Math.min(b.minY, p.y);
    b.maxY = Math.max(b.maxY, p.y);
  }
  if (!isFinite(b.minX)) {
    return { minX: -1, maxX: 1, minY: -1, maxY: 1 };
  }
  return b;
}

export class ScatterView {
  private ctx: CanvasRenderingContext2D;
  private points: ScatterDatum[] = [];
  private highlight = new Set<string>();
  private selected: string | null = null;
  private palette = new Map<string, string>();
  private trajectories: TransitionPlan | null = null;
  private animation: number | null = null;
  private bounds: Bounds = { minX: -1, maxX: 1, minY: -1, maxY: 1 };

  constructor(
    private canvas: HTMLCanvasElement,
    private onSelect: (id: string | null) => void,
  ) {
    this.ctx = canvas.getContext("2d") as CanvasRenderingContext2D;
    canvas.addEventListener("click", (event) => this.handleClick(event));
  }

  setPalette(palette: Map<string, string>): void {
    this.palette = palette;
  }

  setHighlight(ids: Set<string>): void {
    this.highlight = ids;
    this.draw(this.points);
  }

  setSelected(id: string | null): void {
    this.selected = id;
    this.draw(this.points);
  }

  /** Replace the frame instantly (initial load, centering toggles). */
  setData(points: ScatterDatum[]): void {
    this.cancelAnimation();
    this.points = points;
    this.bounds = boundsOf(points);
    this.draw(points);
  }

  /** Overlay trajectory lines (thumbnail hover), or clear with null. */
  showTrajectories(plan: TransitionPlan | null): void {
    this.trajectories = plan;
    this.draw(this.points);
  }

  /** Animate toward the destination frame along the given plan. */
  transitionTo(target: ScatterDatum[], plan: TransitionPlan, done?: () => void): void {
    this.cancelAnimation();
    this.trajectories = null;
    const byIdTarget = new Map(target.map((p) => [p.id, p]));
    const byIdSource = new Map(this.points.map((p) => [p.id, p]));
    const union = [...this.points, ...target.filter((p) => !byIdSource.has(p.id))];
    this.bounds = boundsOf(union);
    const start = performance.now();
    const step = (now: number) => {
      const t = easeInOut((now - start) / TRANSITION_MS);
      const frame: ScatterDatum[] = [];
      const alphaOut = 1 - t;
      for (const move of plan.moving) {
        const src = byIdSource.get(move.id);
        const dst = byIdTarget.get(move.id);
        if (!src || !dst) continue;
        frame.push({
          ...dst,
          x: move.from[0] + (move.to[0] - move.from[0]) * t,
          y: move.from[1] + (move.to[1] - move.from[1]) * t,
        });
      }
      const fading: Array<[ScatterDatum, number]> = [];
      for (const out of plan.fadeOut) {
        const src = byIdSource.get(out.id);
        if (src) fading.push([src, alphaOut]);
      }
      for (const incoming of plan.fadeIn) {
        const dst = byIdTarget.get(incoming.id);
        if (dst) fading.push([dst, t]);
      }
      this.draw(frame, fading);
      if (t < 1) {
        this.animation = requestAnimationFrame(step);
      } else {
        this.animation = null;
        this.points = target;
        this.bounds = boundsOf(target);
        this.draw(target);
        done?.();
      }
    };
    this.animation = requestAnimationFrame(step);
  }

  private cancelAnimation(): void {
    if (this.animation !== null) {
      cancelAnimationFrame(this.animation);
      this.animation = null;
    }
  }

  private toCanvas(x: number, y: number): [number, number] {
    const { width, height } = this.canvas;
    const pad = 18 * devicePixelRatio;
    const { minX, maxX, minY, maxY } = this.bounds;
    const sx = (width - 2 * pad) / Math.max(maxX - minX, 1e-9);
    const sy = (height - 2 * pad) / Math.max(maxY - minY, 1e-9);
    const s = Math.min(sx, sy);
    const cx = (minX + maxX) / 2;
    const cy = (minY + maxY) / 2;
    return [width / 2 + (x - cx) * s, height / 2 - (y - cy) * s];
  }

  private handleClick(event: MouseEvent): void {
    const rect = this.canvas.getBoundingClientRect();
    const px = (event.clientX - rect.left) * devicePixelRatio;
    const py = (event.clientY - rect.top) * devicePixelRatio;
    let best: string | null = null;
    let bestDist = 12 * devicePixelRatio;
    for (const point of this.points) {
      const [x, y] = this.toCanvas(point.x, point.y);
      const d = Math.hypot(x - px, y - py);
      if (d < bestDist) {
        bestDist = d;
        best = point.id;
      }
    }
    this.onSelect(best);
  }

  private draw(points: ScatterDatum[], fading: Array<[ScatterDatum, number]> = []): void {
    const ctx = this.ctx;
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);
    const r = 2.4 * devicePixelRatio;

    if (this.trajectories) {
      ctx.strokeStyle = "rgba(90, 90, 90, 0.35)";
      ctx.lineWidth = 1 * devicePixelRatio;
      ctx.beginPath();
      for (const move of this.trajectories.moving) {
        const [x0, y0] = this.toCanvas(move.from[0], move.from[1]);
        const [x1, y1] = this.toCanvas(move.to[0], move.to[1]);
        ctx.moveTo(x0, y0);
        ctx.lineTo(x1, y1);
      }
      ctx.stroke();
    }

    for (const point of points) {
      const [x, y] = this.toCanvas(point.x, point.y);
      ctx.globalAlpha = 1;
      ctx.fillStyle = this.palette.get(point.group) ?? "#888";
      ctx.fillRect(x - r, y - r, 2 * r, 2 * r);
    }
    for (const [point, alpha] of fading) {
      const [x, y] = this.toCanvas(point.x, point.y);
      ctx.globalAlpha = Math.max(0, Math.min(1, alpha));
      ctx.fillStyle = this.palette.get(point.group) ?? "#888";
      ctx.fillRect(x - r, y - r, 2 * r, 2 * r);
    }
    ctx.globalAlpha = 1;

    if (this.highlight.size > 0) {
      ctx.strokeStyle = "#111";
      ctx.lineWidth = 1.5 * devicePixelRatio;
      for (const point of points) {
        if (!this.highlight.has(point.id)) continue;
        const [x, y] = this.toCanvas(point.x, point.y);
        ctx.beginPath();
        ctx.arc(x, y, r + 2.5 * devicePixelRatio, 0, 2 * Math.PI);
        ctx.stroke();
      }
    }
    if (this.selected) {
      const sel = points.find((p) => p.id === this.selected);
      if (sel) {
        const [x, y] = this.toCanvas(sel.x, sel.y);
        ctx.strokeStyle = "#d62728";
        ctx.lineWidth = 2 * devicePixelRatio;
        ctx.beginPath();
        ctx.arc(x, y, r + 4.5 * devicePixelRatio, 0, 2 * Math.PI);
        ctx.stroke();
      }
    }
  }
}

/** Draw a static miniature of a frame onto a thumbnail canvas. */
export function drawThumbnail(
  canvas: HTMLCanvasElement,
  points: Array<{ x: number; y: number; group: string }>,
  palette: Map<string, string>,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  const b = boundsOf(points);
  const pad = 4;
  const s = Math.min(
    (width - 2 * pad) / Math.max(b.maxX - b.minX, 1e-9),
    (height - 2 * pad) / Math.max(b.maxY - b.minY, 1e-9),
  );
  const cx = (b.minX + b.maxX) / 2;
  const cy = (b.minY + b.maxY) / 2;
  for (const p of points) {
    ctx.fillStyle = palette.get(p.group) ?? "#888";
    ctx.fillRect(
      width / 2 + (p.x - cx) * s - 1,
      height / 2 - (p.y - cy) * s - 1,
      2,
      2,
    );
  }
}
