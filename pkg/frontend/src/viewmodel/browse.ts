/** Pure view logic for the Browse scatter: legends, neighbor highlights,
 * centering, and the corpus-to-corpus transition plan that the animation
 * renderer executes. */

import type { ConceptDetail, Projection, ProjectionPoint } from "../types.js";

export const TRANSITION_MS = 600;

/** Symmetric cubic ease-in-out on [0, 1]. */
export function easeInOut(t: number): number {
  const x = Math.min(1, Math.max(0, t));
  return x < 0.5 ? 4 * x * x * x : 1 - Math.pow(-2 * x + 2, 3) / 2;
}

/** Distinct semantic groups present in the payload, in stable order. */
export function legendGroups(projection: Projection): string[] {
  return [...new Set(projection.points.map((p) => p.group))].sort();
}

/** Ids to highlight when a concept is selected: its aggregate neighbors in
 * the active corpus (the detail block's neighbor column). */
export function highlightSet(detail: ConceptDetail, corpusId: string): Set<string> {
  const block = detail.corpora.find((b) => b.corpus_id === corpusId);
  if (!block || !block.present) {
    return new Set();
  }
  return new Set(block.neighbors.map((n) => n.id));
}

/** Shift all coordinates so the centered concept sits at the origin. */
export function centerPoints(
  points: ProjectionPoint[],
  centerId: string | null,
): ProjectionPoint[] {
  if (!centerId) {
    return points;
  }
  const center = points.find((p) => p.id === centerId);
  if (!center) {
    return points;
  }
  const { x: cx, y: cy } = center;
  return points.map((p) => ({ ...p, x: p.x - cx, y: p.y - cy }));
}

export interface Trajectory {
  id: string;
  from: [number, number];
  to: [number, number];
}

export interface FadePoint {
  id: string;
  at: [number, number];
}

export interface TransitionPlan {
  moving: Trajectory[];
  fadeOut: FadePoint[];
  fadeIn: FadePoint[];
}

/** Trajectories for concepts present in both frames (identity preserved),
 * fade-outs for concepts that disappear, fade-ins for new arrivals. */
export function planTransition(from: Projection, to: Projection): TransitionPlan {
  const source = new Map(from.points.map((p) => [p.id, p]));
  const target = new Map(to.points.map((p) => [p.id, p]));
  const moving: Trajectory[] = [];
  const fadeOut: FadePoint[] = [];
  const fadeIn: FadePoint[] = [];
  for (const point of from.points) {
    const dest = target.get(point.id);
    if (dest) {
      moving.push({ id: point.id, from: [point.x, point.y], to: [dest.x, dest.y] });
    } else {
      fadeOut.push({ id: point.id, at: [point.x, point.y] });
    }
  }
  for (const point of to.points) {
    if (!source.has(point.id)) {
      fadeIn.push({ id: point.id, at: [point.x, point.y] });
    }
  }
  return { moving, fadeOut, fadeIn };
}

/** Concepts whose trajectories are longest; these draw attention on hover. */
export function longestTrajectories(plan: TransitionPlan, top: number): Trajectory[] {
  return [...plan.moving]
    .sort((a, b) => length2(b) - length2(a))
    .slice(0, top);
}

function length2(t: Trajectory): number {
  const dx = t.to[0] - t.from[0];
  const dy = t.to[1] - t.from[1];
  return dx * dx + dy * dy;
}
