// Chart state is computed as plain data first (testable without a DOM),
// then painted onto a canvas. Log-log degree scatter per the applet,
// plus linear time series for clustering and neighborhood means.

import type { ShapeFitWire, Snapshot } from "./protocol.js";
import type { SeriesPoint } from "./model.js";

export interface ChartPoint {
  x: number;
  y: number;
}

export interface DegreeSeries {
  label: string;
  color: string;
  points: ChartPoint[]; // log10(degree), log10(count)
  // backend-fitted slope overlay; the exponent is never computed here
  overlay: { slope: number; anchor: ChartPoint; label: string } | null;
}

export interface DegreeChartState {
  series: DegreeSeries[];
  xRange: [number, number];
  yRange: [number, number];
  empty: boolean;
}

const USER_COLOR = "#2563eb";
const ITEM_COLOR = "#dc2626";

function logPoints(bins: [number, number][]): ChartPoint[] {
  const points: ChartPoint[] = [];
  for (const [degree, count] of bins) {
    if (degree <= 0 || count <= 0) continue; // log safety
    points.push({ x: Math.log10(degree), y: Math.log10(count) });
  }
  points.sort((a, b) => a.x - b.x);
  return points;
}

function fitOverlay(
  fit: ShapeFitWire | null,
  points: ChartPoint[],
): DegreeSeries["overlay"] {
  if (!fit || points.length === 0) return null;
  let sx = 0;
  let sy = 0;
  for (const p of points) {
    sx += p.x;
    sy += p.y;
  }
  const anchor = { x: sx / points.length, y: sy / points.length };
  return {
    slope: -fit.power_law_exponent,
    anchor,
    label: `slope ${(-fit.power_law_exponent).toFixed(2)} (${fit.preferred})`,
  };
}

export function degreeChartState(snapshot: Snapshot | null): DegreeChartState {
  if (!snapshot) {
    return { series: [], xRange: [0, 1], yRange: [0, 1], empty: true };
  }
  const series: DegreeSeries[] = [
    {
      label: "users",
      color: USER_COLOR,
      points: logPoints(snapshot.histograms.user.bins),
      overlay: null,
    },
    {
      label: "items",
      color: ITEM_COLOR,
      points: logPoints(snapshot.histograms.item.bins),
      overlay: null,
    },
  ];
  series[0].overlay = fitOverlay(snapshot.degree_fit.user, series[0].points);
  series[1].overlay = fitOverlay(snapshot.degree_fit.item, series[1].points);

  const all = series.flatMap((s) => s.points);
  if (all.length === 0) {
    return { series, xRange: [0, 1], yRange: [0, 1], empty: true };
  }
  const xs = all.map((p) => p.x);
  const ys = all.map((p) => p.y);
  const pad = 0.25;
  return {
    series,
    xRange: [Math.min(...xs) - pad, Math.max(...xs) + pad],
    yRange: [Math.min(...ys) - pad, Math.max(...ys) + pad],
    empty: false,
  };
}

export interface SeriesChartState {
  lines: { label: string; color: string; points: ChartPoint[] }[];
  xRange: [number, number];
  yRange: [number, number];
  empty: boolean;
}

export function seriesChartState(
  points: SeriesPoint[],
  keys: { key: keyof SeriesPoint; label: string; color: string }[],
): SeriesChartState {
  const lines = keys.map(({ key, label, color }) => ({
    label,
    color,
    points: points
      .filter((p) => p[key] !== null)
      .map((p) => ({ x: p.t, y: p[key] as number })),
  }));
  const all = lines.flatMap((l) => l.points);
  if (all.length === 0) {
    return { lines, xRange: [0, 1], yRange: [0, 1], empty: true };
  }
  const xs = all.map((p) => p.x);
  const ys = all.map((p) => p.y);
  const ymin = Math.min(...ys);
  const ymax = Math.max(...ys);
  const pad = (ymax - ymin || 1) * 0.1;
  return {
    lines,
    xRange: [Math.min(...xs), Math.max(...xs) || 1],
    yRange: [ymin - pad, ymax + pad],
    empty: false,
  };
}

// -- painting ----------------------------------------------------------

interface Frame {
  left: number;
  top: number;
  width: number;
  height: number;
  xRange: [number, number];
  yRange: [number, number];
}

function toPixel(frame: Frame, p: ChartPoint): [number, number] {
  const [x0, x1] = frame.xRange;
  const [y0, y1] = frame.yRange;
  const fx = (p.x - x0) / (x1 - x0 || 1);
  const fy = (p.y - y0) / (y1 - y0 || 1);
  return [frame.left + fx * frame.width, frame.top + (1 - fy) * frame.height];
}

function clear(ctx: CanvasRenderingContext2D, title: string): Frame {
  const { width, height } = ctx.canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#475569";
  ctx.font = "12px system-ui, sans-serif";
  ctx.fillText(title, 8, 14);
  return {
    left: 34,
    top: 22,
    width: width - 44,
    height: height - 40,
    xRange: [0, 1],
    yRange: [0, 1],
  };
}

function axes(ctx: CanvasRenderingContext2D, frame: Frame): void {
  ctx.strokeStyle = "#cbd5e1";
  ctx.lineWidth = 1;
  ctx.strokeRect(frame.left, frame.top, frame.width, frame.height);
}

export function drawDegreeChart(
  ctx: CanvasRenderingContext2D,
  state: DegreeChartState,
): void {
  const frame = clear(ctx, "degree distribution (log-log)");
  frame.xRange = state.xRange;
  frame.yRange = state.yRange;
  axes(ctx, frame);
  if (state.empty) return;
  for (const series of state.series) {
    ctx.fillStyle = series.color;
    for (const p of series.points) {
      const [px, py] = toPixel(frame, p);
      ctx.beginPath();
      ctx.arc(px, py, 2.5, 0, Math.PI * 2);
      ctx.fill();
    }
    if (series.overlay) {
      const { slope, anchor } = series.overlay;
      const [x0, x1] = state.xRange;
      const a = toPixel(frame, { x: x0, y: anchor.y + slope * (x0 - anchor.x) });
      const b = toPixel(frame, { x: x1, y: anchor.y + slope * (x1 - anchor.x) });
      ctx.strokeStyle = series.color;
      ctx.setLineDash([5, 4]);
      ctx.beginPath();
      ctx.moveTo(a[0], a[1]);
      ctx.lineTo(b[0], b[1]);
      ctx.stroke();
      ctx.setLineDash([]);
    }
  }
}

export function drawSeriesChart(
  ctx: CanvasRenderingContext2D,
  state: SeriesChartState,
  title: string,
): void {
  const frame = clear(ctx, title);
  frame.xRange = state.xRange;
  frame.yRange = state.yRange;
  axes(ctx, frame);
  if (state.empty) return;
  for (const line of state.lines) {
    if (line.points.length === 0) continue;
    ctx.strokeStyle = line.color;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    line.points.forEach((p, i) => {
      const [px, py] = toPixel(frame, p);
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    ctx.stroke();
  }
  // legend
  let lx = frame.left + 6;
  for (const line of state.lines) {
    ctx.fillStyle = line.color;
    ctx.fillText(line.label, lx, frame.top + 12);
    lx += ctx.measureText(line.label).width + 14;
  }
}
