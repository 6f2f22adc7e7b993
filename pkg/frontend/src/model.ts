// Session model: a reducer over the message log. Replaying the same log
// always rebuilds the same state, and every number in it came off the wire.

import type {
  GeneratorParams,
  ServerMessage,
  Snapshot,
  UiEvent,
} from "./protocol.js";
import { RingBuffer } from "./ring.js";

export const SERIES_CAPACITY = 2048;
export const EDGE_VIEW_LIMIT = 2000;

export interface SeriesPoint {
  t: number;
  blccUser: number | null;
  blccItem: number | null;
  similarUsers: number;
  neighborItems: number;
}

export interface PendingChange {
  patch: Partial<GeneratorParams>;
  sentAtSeq: number;
}

export interface SessionModel {
  connected: boolean;
  session: string | null;
  closed: boolean;
  latest: Snapshot | null;
  series: RingBuffer<SeriesPoint>;
  pending: Map<string, PendingChange>;
  lastError: string | null;
  lastAppliedAtT: number | null;
  edges: [number, number][] | null;
  edgesStaleAtT: number | null; // t when the edge pull was answered
  speed: number | null;
  lastSeq: number;
  droppedSnapshots: number; // detected via seq gaps
}

export function initialModel(): SessionModel {
  return {
    connected: false,
    session: null,
    closed: false,
    latest: null,
    series: new RingBuffer<SeriesPoint>(SERIES_CAPACITY),
    pending: new Map(),
    lastError: null,
    lastAppliedAtT: null,
    edges: null,
    edgesStaleAtT: null,
    speed: null,
    lastSeq: 0,
    droppedSnapshots: 0,
  };
}

function seriesPoint(snapshot: Snapshot): SeriesPoint {
  return {
    t: snapshot.t,
    blccUser: snapshot.blcc.user_mean,
    blccItem: snapshot.blcc.item_mean,
    similarUsers: snapshot.neighborhood.mean_similar_users,
    neighborItems: snapshot.neighborhood.mean_neighbor_items,
  };
}

function applySnapshot(model: SessionModel, snapshot: Snapshot): void {
  if (model.latest && snapshot.t < model.latest.t) {
    // rendered t never decreases, except across an explicit reset
    if (snapshot.t !== 0) return;
    model.series = new RingBuffer<SeriesPoint>(SERIES_CAPACITY);
    model.edges = null;
    model.edgesStaleAtT = null;
  }
  if (model.lastSeq && snapshot.seq > model.lastSeq + 1) {
    model.droppedSnapshots += snapshot.seq - model.lastSeq - 1;
  }
  model.lastSeq = snapshot.seq;
  model.latest = snapshot;
  const last = model.series.last;
  if (last && last.t === snapshot.t) {
    model.series.replaceLast(seriesPoint(snapshot));
  } else {
    model.series.push(seriesPoint(snapshot));
  }
}

function applyServerMessage(model: SessionModel, message: ServerMessage): void {
  switch (message.type) {
    case "snapshot":
      applySnapshot(model, message);
      return;
    case "ack":
      if (message.action === "open") {
        model.session = message.session;
        model.closed = false;
      }
      if (message.client_tag !== undefined) {
        model.pending.delete(message.client_tag);
      }
      if (message.applied_at_t !== undefined) {
        model.lastAppliedAtT = message.applied_at_t;
      }
      if (message.action === "pull_edges" && message.edges) {
        model.edges = message.edges;
        model.edgesStaleAtT = message.t;
      }
      if (message.action === "set_speed") {
        model.speed = message.speed ?? null;
      }
      if (message.action === "reset") {
        model.lastError = null;
      }
      return;
    case "error":
      model.lastError = message.message;
      if (message.client_tag !== undefined) {
        model.pending.delete(message.client_tag);
      }
      if (/session closed/.test(message.message)) {
        model.closed = true;
      }
      return;
  }
}

export function reduce(model: SessionModel, event: UiEvent): SessionModel {
  switch (event.type) {
    case "connected":
      model.connected = true;
      break;
    case "disconnected":
      model.connected = false;
      model.closed = true;
      break;
    default:
      applyServerMessage(model, event);
  }
  return model;
}

export function replay(events: UiEvent[]): SessionModel {
  return events.reduce(reduce, initialModel());
}

/** Record a locally sent patch; the control stays disabled until the ack
 *  or error carrying the same tag clears it. */
export function markPending(
  model: SessionModel,
  tag: string,
  patch: Partial<GeneratorParams>,
): void {
  model.pending.set(tag, { patch, sentAtSeq: model.lastSeq });
}

export function pendingKeys(model: SessionModel): Set<string> {
  const keys = new Set<string>();
  for (const change of model.pending.values()) {
    for (const key of Object.keys(change.patch)) keys.add(key);
  }
  return keys;
}

export function edgeViewAllowed(model: SessionModel): boolean {
  return !!model.latest && model.latest.counts.edges <= EDGE_VIEW_LIMIT;
}
