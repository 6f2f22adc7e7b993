import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { degreeChartState, seriesChartState } from "../src/charts.js";
import type { SeriesPoint } from "../src/model.js";
import type { ServerMessage, Snapshot } from "../src/protocol.js";

const fixture: ServerMessage[] = JSON.parse(
  readFileSync(new URL("./fixtures/session.json", import.meta.url), "utf8"),
);
const snapshots = fixture.filter((m): m is Snapshot => m.type === "snapshot");

function clone(snapshot: Snapshot): Snapshot {
  return JSON.parse(JSON.stringify(snapshot));
}

describe("degreeChartState", () => {
  it("puts every populated histogram bin on the chart, in log-log", () => {
    const snapshot = snapshots[snapshots.length - 1];
    const state = degreeChartState(snapshot);
    expect(state.empty).toBe(false);
    const [users, items] = state.series;
    const populated = (bins: [number, number][]) =>
      bins.filter(([degree, count]) => degree > 0 && count > 0).length;
    expect(users.points).toHaveLength(populated(snapshot.histograms.user.bins));
    expect(items.points).toHaveLength(populated(snapshot.histograms.item.bins));
    for (const point of users.points) {
      expect(Number.isFinite(point.x)).toBe(true);
      expect(Number.isFinite(point.y)).toBe(true);
    }
  });

  it("drops zero-degree and zero-count bins before taking logs", () => {
    const snapshot = clone(snapshots[0]);
    snapshot.histograms.user.bins = [
      [0, 5],
      [1, 3],
      [2, 0],
      [4, 7],
    ];
    const state = degreeChartState(snapshot);
    expect(state.series[0].points).toEqual([
      { x: 0, y: Math.log10(3) },
      { x: Math.log10(4), y: Math.log10(7) },
    ]);
  });

  it("renders the seed graph as a single point per modality", () => {
    const state = degreeChartState(snapshots[0]); // t=0: every node has degree 1
    for (const series of state.series) {
      expect(series.points).toEqual([{ x: 0, y: 1 }]); // log10(1), log10(10)
    }
  });

  it("only overlays a slope when the backend produced a fit", () => {
    const bare = degreeChartState(snapshots[0]);
    expect(bare.series[0].overlay).toBeNull();

    const fitted = clone(snapshots[snapshots.length - 1]);
    fitted.degree_fit.user = {
      power_law_exponent: 2.5,
      power_law_r2: 0.97,
      exponential_rate: 0.4,
      exponential_r2: 0.8,
      preferred: "power_law",
    };
    const state = degreeChartState(fitted);
    const overlay = state.series[0].overlay;
    expect(overlay).not.toBeNull();
    expect(overlay!.slope).toBe(-2.5);
    const points = state.series[0].points;
    const cx = points.reduce((s, p) => s + p.x, 0) / points.length;
    expect(overlay!.anchor.x).toBeCloseTo(cx, 12);
  });

  it("handles a missing snapshot and empty histograms without errors", () => {
    expect(degreeChartState(null).empty).toBe(true);
    const snapshot = clone(snapshots[0]);
    snapshot.histograms.user.bins = [];
    snapshot.histograms.item.bins = [];
    const state = degreeChartState(snapshot);
    expect(state.empty).toBe(true);
    expect(state.series[0].points).toHaveLength(0);
  });
});

describe("seriesChartState", () => {
  const points: SeriesPoint[] = [
    { t: 0, blccUser: null, blccItem: null, similarUsers: 1, neighborItems: 2 },
    { t: 10, blccUser: 0.1, blccItem: 0.2, similarUsers: 2, neighborItems: 4 },
    { t: 20, blccUser: 0.3, blccItem: null, similarUsers: 3, neighborItems: 6 },
  ];

  it("skips undefined values instead of plotting them as zero", () => {
    const state = seriesChartState(points, [
      { key: "blccUser", label: "user", color: "#000" },
    ]);
    expect(state.lines[0].points).toEqual([
      { x: 10, y: 0.1 },
      { x: 20, y: 0.3 },
    ]);
  });

  it("spans the time axis of the defined points", () => {
    const state = seriesChartState(points, [
      { key: "similarUsers", label: "s", color: "#000" },
      { key: "neighborItems", label: "n", color: "#111" },
    ]);
    expect(state.empty).toBe(false);
    expect(state.xRange).toEqual([0, 20]);
    expect(state.yRange[0]).toBeLessThan(1);
    expect(state.yRange[1]).toBeGreaterThan(6);
  });

  it("reports empty when nothing is defined", () => {
    const state = seriesChartState(
      [{ t: 0, blccUser: null, blccItem: null, similarUsers: 0, neighborItems: 0 }],
      [{ key: "blccUser", label: "user", color: "#000" }],
    );
    expect(state.empty).toBe(true);
    expect(state.lines[0].points).toHaveLength(0);
  });
});
