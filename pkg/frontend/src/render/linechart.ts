/** Canvas line chart for the Compare view: one line per comparison concept,
 * vertical error bars (one standard deviation each way), hollow markers for
 * low-confidence comparison points, gaps where the reference was omitted. */

import { fmt3 } from "../format.js";
import type { CompareChart } from "../viewmodel/compare.js";

const LINE_COLORS = ["#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1", "#76b7b2", "#edc948", "#9c755f"];

export function drawCompareChart(canvas: HTMLCanvasElement, chart: CompareChart): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width, height } = canvas;
  const dpr = devicePixelRatio;
  ctx.clearRect(0, 0, width, height);
  const left = 52 * dpr;
  const right = width - 16 * dpr;
  const top = 18 * dpr;
  const bottom = height - 34 * dpr;

  const values: number[] = [];
  for (const line of chart.lines) {
    for (const point of line.points) {
      values.push(point.mean - point.std, point.mean + point.std);
    }
  }
  const lo = values.length ? Math.min(0, ...values) : 0;
  const hi = values.length ? Math.max(1, ...values) : 1;
  const yOf = (v: number) => bottom - ((v - lo) / (hi - lo || 1)) * (bottom - top);
  const corpusX = new Map<string, number>();
  chart.corpusOrder.forEach((cid, i) => {
    const step = (right - left) / Math.max(chart.corpusOrder.length - 1, 1);
    corpusX.set(cid, left + i * step);
  });

  // axes and corpus labels
  ctx.strokeStyle = "#999";
  ctx.lineWidth = 1 * dpr;
  ctx.beginPath();
  ctx.moveTo(left, top);
  ctx.lineTo(left, bottom);
  ctx.lineTo(right, bottom);
  ctx.stroke();
  ctx.fillStyle = "#444";
  ctx.font = `${11 * dpr}px sans-serif`;
  ctx.textAlign = "center";
  for (const cid of chart.corpusOrder) {
    ctx.fillText(cid, corpusX.get(cid) as number, bottom + 16 * dpr);
  }
  ctx.textAlign = "right";
  for (const tick of [lo, (lo + hi) / 2, hi]) {
    ctx.fillText(fmt3(tick), left - 6 * dpr, yOf(tick) + 4 * dpr);
  }

  chart.lines.forEach((line, index) => {
    const color = LINE_COLORS[index % LINE_COLORS.length];
    ctx.strokeStyle = color;
    ctx.fillStyle = color;
    ctx.lineWidth = 2 * dpr;

    ctx.beginPath();
    let started = false;
    for (const point of line.points) {
      const x = corpusX.get(point.corpusId);
      if (x === undefined) continue;
      const y = yOf(point.mean);
      if (started) {
        ctx.lineTo(x, y);
      } else {
        ctx.moveTo(x, y);
        started = true;
      }
    }
    ctx.stroke();

    for (const point of line.points) {
      const x = corpusX.get(point.corpusId);
      if (x === undefined) continue;
      const y = yOf(point.mean);
      // error bar with caps
      ctx.lineWidth = 1.2 * dpr;
      ctx.beginPath();
      ctx.moveTo(x, yOf(point.mean - point.std));
      ctx.lineTo(x, yOf(point.mean + point.std));
      ctx.moveTo(x - 3 * dpr, yOf(point.mean - point.std));
      ctx.lineTo(x + 3 * dpr, yOf(point.mean - point.std));
      ctx.moveTo(x - 3 * dpr, yOf(point.mean + point.std));
      ctx.lineTo(x + 3 * dpr, yOf(point.mean + point.std));
      ctx.stroke();
      // marker: hollow when the comparison concept is low-confidence there
      ctx.beginPath();
      ctx.arc(x, y, 4 * dpr, 0, 2 * Math.PI);
      if (point.hollow) {
        ctx.fillStyle = "#fff";
        ctx.fill();
        ctx.stroke();
        ctx.fillStyle = color;
      } else {
        ctx.fill();
      }
    }
  });
}
