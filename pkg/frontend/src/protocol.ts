// Wire types for the steering service protocol. Field names follow the
// backend JSON verbatim; nothing here is computed client-side.

export interface GeneratorParams {
  m: number;
  iterations: number;
  p: number;
  u: number;
  v: number;
  alpha: number;
  beta: number;
  bounce: number;
}

export interface HistogramWire {
  bins: [number, number][]; // [degree, nodeCount], busiest bins only
  tail: number; // nodes in bins beyond the wire cut
  mean: number;
  second_moment: number;
}

export interface ShapeFitWire {
  power_law_exponent: number;
  power_law_r2: number;
  exponential_rate: number;
  exponential_r2: number;
  preferred: "power_law" | "exponential";
}

export interface Snapshot {
  type: "snapshot";
  session: string;
  seq: number;
  t: number;
  status: "running" | "paused";
  params: GeneratorParams;
  counts: { users: number; items: number; edges: number };
  histograms: { user: HistogramWire; item: HistogramWire };
  blcc: {
    user_mean: number | null;
    item_mean: number | null;
    defined_count: number;
    undefined_count: number;
    sampled: boolean;
  };
  neighborhood: {
    mean_similar_users: number;
    mean_neighbor_items: number;
    sampled: boolean;
  };
  degree_fit: { user: ShapeFitWire | null; item: ShapeFitWire | null };
}

export interface Ack {
  type: "ack";
  session: string;
  action: string;
  t: number;
  applied_at_t?: number;
  client_tag?: string;
  params?: GeneratorParams;
  edges?: [number, number][];
  histograms?: Record<string, { counts: Record<string, number> }>;
  speed?: number | null;
  seed?: number;
}

export interface ErrorMessage {
  type: "error";
  session: string | null;
  message: string;
  client_tag?: string;
}

export type ServerMessage = Snapshot | Ack | ErrorMessage;

// Synthetic events so the reducer sees the whole session as one log.
export type UiEvent =
  | ServerMessage
  | { type: "connected" }
  | { type: "disconnected" };

export function isServerMessage(value: unknown): value is ServerMessage {
  if (typeof value !== "object" || value === null) return false;
  const type = (value as { type?: unknown }).type;
  return type === "snapshot" || type === "ack" || type === "error";
}

export interface ParamUpdate {
  type: "param_update";
  session: string;
  patch: Partial<GeneratorParams>;
  client_tag: string;
}

export interface Control {
  type: "control";
  action: string;
  session?: string;
  params?: GeneratorParams;
  seed?: number;
  speed?: number | null;
}

export type ClientMessage = ParamUpdate | Control;
