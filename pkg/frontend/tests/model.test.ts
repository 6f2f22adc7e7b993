// The fixture is a verbatim receive log captured from the backend
// (scripts/capture_fixture.py): open, run to auto-pause at t=30, live
// alpha patch, rejected patch, resume to t=60, edge pull, speed change.

import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import {
  EDGE_VIEW_LIMIT,
  edgeViewAllowed,
  initialModel,
  markPending,
  pendingKeys,
  reduce,
  replay,
} from "../src/model.js";
import type { ServerMessage, Snapshot, UiEvent } from "../src/protocol.js";
import { isServerMessage } from "../src/protocol.js";

const fixture: ServerMessage[] = JSON.parse(
  readFileSync(new URL("./fixtures/session.json", import.meta.url), "utf8"),
);

const sessionLog: UiEvent[] = [{ type: "connected" }, ...fixture];

const snapshots = fixture.filter((m): m is Snapshot => m.type === "snapshot");

function lastSnapshot(): Snapshot {
  return JSON.parse(JSON.stringify(snapshots[snapshots.length - 1]));
}

describe("fixture sanity", () => {
  it("all captured messages pass the wire guard", () => {
    for (const message of fixture) {
      expect(isServerMessage(message)).toBe(true);
    }
    expect(isServerMessage({ type: "nonsense" })).toBe(false);
    expect(isServerMessage(null)).toBe(false);
    expect(isServerMessage("snapshot")).toBe(false);
  });
});

describe("replaying the captured session", () => {
  it("adopts the session from the open ack", () => {
    const model = replay(sessionLog.slice(0, 2));
    expect(model.session).toBe("s1");
    expect(model.connected).toBe(true);
    expect(model.closed).toBe(false);
  });

  it("ends on the final steered snapshot", () => {
    const model = replay(sessionLog);
    expect(model.latest?.t).toBe(60);
    expect(model.latest?.status).toBe("paused");
    expect(model.latest?.params.alpha).toBe(0.9);
    expect(model.latest?.params.iterations).toBe(60);
  });

  it("builds a non-decreasing series with boundary snapshots merged", () => {
    const model = replay(sessionLog);
    const ts = model.series.toArray().map((p) => p.t);
    expect(ts).toEqual([0, 10, 20, 30, 40, 50, 60]);
    for (let i = 1; i < ts.length; i++) {
      expect(ts[i]).toBeGreaterThan(ts[i - 1]);
    }
  });

  it("records where the patch landed", () => {
    const model = replay(sessionLog);
    expect(model.lastAppliedAtT).toBe(30);
  });

  it("keeps the rejected patch as the visible error", () => {
    const model = replay(sessionLog);
    expect(model.lastError).toMatch(/p must lie/);
  });

  it("stores pulled edges with their freshness stamp", () => {
    const model = replay(sessionLog);
    expect(model.edges).toHaveLength(190);
    expect(model.edgesStaleAtT).toBe(60);
    expect(model.edges![0]).toHaveLength(2);
  });

  it("tracks the acknowledged speed", () => {
    const model = replay(sessionLog);
    expect(model.speed).toBe(500);
  });

  it("sees no dropped snapshots in a gap-free log", () => {
    const model = replay(sessionLog);
    expect(model.droppedSnapshots).toBe(0);
  });

  it("is deterministic: two replays agree", () => {
    const a = replay(sessionLog);
    const b = replay(sessionLog);
    expect(a.series.toArray()).toEqual(b.series.toArray());
    expect(a.latest).toEqual(b.latest);
    expect(a).toEqual(b);
  });
});

describe("pending patches", () => {
  it("a tagged ack clears its pending entry", () => {
    const model = replay(sessionLog.slice(0, 7)); // through the paused t=30 snapshot
    markPending(model, "fix-1", { alpha: 0.9, iterations: 60 });
    expect(pendingKeys(model)).toEqual(new Set(["alpha", "iterations"]));
    reduce(model, fixture[6]); // param_update ack carrying fix-1
    expect(model.pending.size).toBe(0);
    expect(pendingKeys(model).size).toBe(0);
  });

  it("a tagged error also clears pending and surfaces the message", () => {
    const model = replay(sessionLog.slice(0, 9));
    markPending(model, "fix-2", { p: 1.5 });
    reduce(model, fixture[8]); // error carrying fix-2
    expect(model.pending.size).toBe(0);
    expect(model.lastError).toMatch(/p must lie/);
  });
});

describe("snapshot edge cases", () => {
  it("counts sequence gaps as dropped snapshots", () => {
    const gappy: UiEvent[] = [
      { type: "connected" },
      fixture[0],
      snapshots[0], // seq 1
      snapshots[5], // seq 6: seqs 2 through 5 never arrived
    ];
    const model = replay(gappy);
    expect(model.droppedSnapshots).toBe(4);
  });

  it("ignores a stale out-of-order snapshot", () => {
    const model = replay(sessionLog);
    const stale = JSON.parse(JSON.stringify(snapshots[1])) as Snapshot; // t=10
    stale.seq = 99;
    reduce(model, stale);
    expect(model.latest?.t).toBe(60);
    expect(model.series.last?.t).toBe(60);
  });

  it("a reset snapshot at t=0 clears the series and edge view", () => {
    const model = replay(sessionLog);
    expect(model.series.length).toBe(7);
    const fresh = lastSnapshot();
    fresh.t = 0;
    fresh.seq = 10;
    reduce(model, fresh);
    expect(model.series.toArray().map((p) => p.t)).toEqual([0]);
    expect(model.edges).toBeNull();
    expect(model.edgesStaleAtT).toBeNull();
  });

  it("a same-t snapshot replaces the last series point", () => {
    const model = replay(sessionLog);
    const before = model.series.length;
    const again = lastSnapshot();
    again.seq = 10;
    again.blcc.user_mean = 0.123;
    reduce(model, again);
    expect(model.series.length).toBe(before);
    expect(model.series.last?.blccUser).toBe(0.123);
  });
});

describe("connection lifecycle", () => {
  it("disconnect marks the session closed", () => {
    const model = replay(sessionLog);
    reduce(model, { type: "disconnected" });
    expect(model.connected).toBe(false);
    expect(model.closed).toBe(true);
  });

  it("an owner-teardown error closes the session", () => {
    const model = replay(sessionLog);
    reduce(model, {
      type: "error",
      session: "s1",
      message: "session closed by owner",
    });
    expect(model.closed).toBe(true);
  });

  it("starts empty", () => {
    const model = initialModel();
    expect(model.session).toBeNull();
    expect(model.latest).toBeNull();
    expect(model.series.length).toBe(0);
  });
});

describe("edge view gating", () => {
  it("allows the pull below the wire limit", () => {
    const model = replay(sessionLog);
    expect(model.latest?.counts.edges).toBeLessThanOrEqual(EDGE_VIEW_LIMIT);
    expect(edgeViewAllowed(model)).toBe(true);
  });

  it("blocks the pull once the graph outgrows the limit", () => {
    const model = replay(sessionLog);
    const big = lastSnapshot();
    big.seq = 10;
    big.t = 61;
    big.counts.edges = EDGE_VIEW_LIMIT + 1;
    reduce(model, big);
    expect(edgeViewAllowed(model)).toBe(false);
  });
});
