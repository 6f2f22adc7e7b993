// DOM construction and painting. Paints are coalesced: however fast
// snapshots arrive, the screen is redrawn at most ten times per second.

import {
  degreeChartState,
  drawDegreeChart,
  drawSeriesChart,
  seriesChartState,
} from "./charts.js";
import { CONTROLS, type ControlKey, type ControlSpec } from "./controls.js";
import { drawLayout, layoutGraph } from "./layout.js";
import {
  EDGE_VIEW_LIMIT,
  edgeViewAllowed,
  pendingKeys,
  type SessionModel,
} from "./model.js";

export const MAX_PAINTS_PER_SECOND = 10;

export interface UiHandlers {
  onOpen(seed: number): void;
  onControl(action: "start" | "pause" | "reset"): void;
  onPatch(key: ControlKey, value: number): void;
  onSpeed(value: number | null): void;
  onPullEdges(): void;
}

export interface UiRefs {
  status: HTMLSpanElement;
  counts: HTMLSpanElement;
  fit: HTMLSpanElement;
  errorBar: HTMLDivElement;
  sliders: Map<ControlKey, { input: HTMLInputElement; value: HTMLSpanElement }>;
  buttons: { start: HTMLButtonElement; pause: HTMLButtonElement; reset: HTMLButtonElement; pull: HTMLButtonElement };
  graphCanvas: HTMLCanvasElement;
  graphBadge: HTMLDivElement;
  degreeCanvas: HTMLCanvasElement;
  blccCanvas: HTMLCanvasElement;
  neighborhoodCanvas: HTMLCanvasElement;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function canvas(width: number, height: number): HTMLCanvasElement {
  const c = el("canvas");
  c.width = width;
  c.height = height;
  return c;
}

function controlRow(
  spec: ControlSpec,
  handlers: UiHandlers,
): { row: HTMLDivElement; input: HTMLInputElement; value: HTMLSpanElement } {
  const row = el("div", "control-row");
  const label = el("label", "control-label", spec.label);
  const value = el("span", "control-value");
  const input = el("input");
  input.type = spec.kind === "fraction" ? "range" : "number";
  input.min = String(spec.min);
  if (spec.max !== null) input.max = String(spec.max);
  input.step = String(spec.step);
  input.addEventListener("input", () => {
    value.textContent = input.value;
  });
  input.addEventListener("change", () => {
    handlers.onPatch(spec.key, Number(input.value));
  });
  row.append(label, input, value);
  return { row, input, value };
}

export function buildUi(root: HTMLElement, handlers: UiHandlers): UiRefs {
  root.replaceChildren();

  const header = el("header");
  header.append(el("h1", undefined, "bipartite growth steering"));
  const status = el("span", "status", "disconnected");
  const counts = el("span", "counts", "");
  header.append(status, counts);

  const main = el("main");

  // left: session + parameter controls
  const panel = el("section", "panel params");
  const sessionRow = el("div", "control-row");
  const seedInput = el("input");
  seedInput.type = "number";
  seedInput.value = "0";
  seedInput.step = "1";
  const openButton = el("button", undefined, "open session");
  openButton.addEventListener("click", () =>
    handlers.onOpen(Number(seedInput.value) || 0),
  );
  sessionRow.append(el("label", "control-label", "seed"), seedInput, openButton);
  panel.append(el("h2", undefined, "session"), sessionRow);

  const runRow = el("div", "button-row");
  const start = el("button", undefined, "start");
  const pause = el("button", undefined, "pause");
  const reset = el("button", undefined, "reset");
  start.addEventListener("click", () => handlers.onControl("start"));
  pause.addEventListener("click", () => handlers.onControl("pause"));
  reset.addEventListener("click", () => handlers.onControl("reset"));
  runRow.append(start, pause, reset);
  panel.append(runRow);

  panel.append(el("h2", undefined, "parameters"));
  const sliders = new Map<
    ControlKey,
    { input: HTMLInputElement; value: HTMLSpanElement }
  >();
  for (const spec of CONTROLS) {
    const { row, input, value } = controlRow(spec, handlers);
    sliders.set(spec.key, { input, value });
    panel.append(row);
  }

  const speedRow = el("div", "control-row");
  const speedInput = el("input");
  speedInput.type = "number";
  speedInput.min = "1";
  speedInput.placeholder = "unthrottled";
  speedInput.addEventListener("change", () => {
    handlers.onSpeed(speedInput.value === "" ? null : Number(speedInput.value));
  });
  speedRow.append(el("label", "control-label", "iterations/s"), speedInput);
  panel.append(speedRow);

  const fit = el("span", "fit", "");
  panel.append(el("h2", undefined, "degree fit"), fit);

  // center: graph view
  const center = el("section", "panel graph");
  const pull = el("button", undefined, "pull edges");
  pull.addEventListener("click", () => handlers.onPullEdges());
  const graphBadge = el("div", "badge hidden");
  const graphCanvas = canvas(520, 520);
  center.append(el("h2", undefined, "graph"), pull, graphBadge, graphCanvas);

  // right: charts
  const charts = el("section", "panel charts");
  const degreeCanvas = canvas(360, 240);
  const blccCanvas = canvas(360, 170);
  const neighborhoodCanvas = canvas(360, 170);
  charts.append(degreeCanvas, blccCanvas, neighborhoodCanvas);

  main.append(panel, center, charts);

  const errorBar = el("div", "error-bar hidden");
  root.append(header, main, errorBar);

  return {
    status,
    counts,
    fit,
    errorBar,
    sliders,
    buttons: { start, pause, reset, pull },
    graphCanvas,
    graphBadge,
    degreeCanvas,
    blccCanvas,
    neighborhoodCanvas,
  };
}

function fitLine(model: SessionModel): string {
  const fit = model.latest?.degree_fit;
  if (!fit) return "";
  const side = (name: string, f: { power_law_exponent: number; preferred: string } | null) =>
    f ? `${name}: exponent ${f.power_law_exponent.toFixed(2)} (${f.preferred})` : `${name}: n/a`;
  return `${side("users", fit.user)}  ${side("items", fit.item)}`;
}

export function paint(model: SessionModel, refs: UiRefs): void {
  const snapshot = model.latest;
  refs.status.textContent = !model.connected
    ? "disconnected"
    : model.session === null
      ? "connected"
      : `${model.session} · ${snapshot?.status ?? "idle"} · t=${snapshot?.t ?? 0}`;
  refs.counts.textContent = snapshot
    ? `${snapshot.counts.users} users · ${snapshot.counts.items} items · ${snapshot.counts.edges} edges` +
      (model.droppedSnapshots ? ` · ${model.droppedSnapshots} frames skipped` : "")
    : "";
  refs.fit.textContent = fitLine(model);

  refs.errorBar.classList.toggle("hidden", model.lastError === null);
  refs.errorBar.textContent = model.lastError ?? "";

  const pending = pendingKeys(model);
  const live = model.connected && model.session !== null && !model.closed;
  for (const [key, slider] of refs.sliders) {
    slider.input.disabled = !live || pending.has(key);
    if (snapshot && document.activeElement !== slider.input && !pending.has(key)) {
      slider.input.value = String(snapshot.params[key]);
      slider.value.textContent = String(snapshot.params[key]);
    }
  }
  refs.buttons.start.disabled = !live || snapshot?.status === "running";
  refs.buttons.pause.disabled = !live || snapshot?.status !== "running";
  refs.buttons.reset.disabled = !live;
  refs.buttons.pull.disabled = !live || !edgeViewAllowed(model);

  if (!edgeViewAllowed(model) && snapshot) {
    refs.graphBadge.classList.remove("hidden");
    refs.graphBadge.textContent = `edge view disabled: ${snapshot.counts.edges} edges exceed the ${EDGE_VIEW_LIMIT}-edge pull limit`;
  } else {
    refs.graphBadge.classList.add("hidden");
  }

  const graphCtx = refs.graphCanvas.getContext("2d");
  if (graphCtx && model.edges) {
    const layout = layoutGraph(model.edges, EDGE_VIEW_LIMIT);
    if (!layout.disabled) drawLayout(graphCtx, layout);
  }

  const degreeCtx = refs.degreeCanvas.getContext("2d");
  if (degreeCtx) drawDegreeChart(degreeCtx, degreeChartState(snapshot));

  const points = model.series.toArray();
  const blccCtx = refs.blccCanvas.getContext("2d");
  if (blccCtx) {
    drawSeriesChart(
      blccCtx,
      seriesChartState(points, [
        { key: "blccUser", label: "user blcc", color: "#2563eb" },
        { key: "blccItem", label: "item blcc", color: "#dc2626" },
      ]),
      "local clustering",
    );
  }
  const nbCtx = refs.neighborhoodCanvas.getContext("2d");
  if (nbCtx) {
    drawSeriesChart(
      nbCtx,
      seriesChartState(points, [
        { key: "similarUsers", label: "similar users", color: "#0d9488" },
        { key: "neighborItems", label: "neighbor items", color: "#9333ea" },
      ]),
      "neighborhood means",
    );
  }
}

export class RenderLoop {
  private lastPaint = 0;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private queued: SessionModel | null = null;

  constructor(private readonly refs: UiRefs) {}

  schedule(model: SessionModel): void {
    const interval = 1000 / MAX_PAINTS_PER_SECOND;
    const now = Date.now();
    if (now - this.lastPaint >= interval) {
      this.lastPaint = now;
      paint(model, this.refs);
      return;
    }
    this.queued = model;
    if (this.timer === null) {
      this.timer = setTimeout(() => {
        this.timer = null;
        if (this.queued) {
          this.lastPaint = Date.now();
          const model = this.queued;
          this.queued = null;
          paint(model, this.refs);
        }
      }, interval - (now - this.lastPaint));
    }
  }
}
