/** Stable group -> color assignment for scatter points and legends. */

const COLORS = [
  "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1",
  "#edc948", "#76b7b2", "#ff9da7", "#9c755f", "#bab0ac",
];

export function paletteFor(groups: string[]): Map<string, string> {
  const sorted = [...new Set(groups)].sort();
  const palette = new Map<string, string>();
  sorted.forEach((group, i) => palette.set(group, COLORS[i % COLORS.length]));
  return palette;
}
