// Live-steerable parameter controls. The seed count m is fixed when a
// session opens, so it never appears here; everything else patches a
// running session through param_update.

import type { GeneratorParams } from "./protocol.js";

export type ControlKey = Exclude<keyof GeneratorParams, "m">;

export interface ControlSpec {
  key: ControlKey;
  label: string;
  kind: "fraction" | "integer";
  min: number;
  max: number | null;
  step: number;
}

export const CONTROLS: ControlSpec[] = [
  { key: "p", label: "user-step probability p", kind: "fraction", min: 0, max: 1, step: 0.01 },
  { key: "alpha", label: "user random-pick mix α", kind: "fraction", min: 0, max: 1, step: 0.01 },
  { key: "beta", label: "item random-pick mix β", kind: "fraction", min: 0, max: 1, step: 0.01 },
  { key: "bounce", label: "bounce probability b", kind: "fraction", min: 0, max: 1, step: 0.01 },
  { key: "u", label: "edges per new user u", kind: "integer", min: 1, max: null, step: 1 },
  { key: "v", label: "edges per new item v", kind: "integer", min: 1, max: null, step: 1 },
  { key: "iterations", label: "iteration budget T", kind: "integer", min: 1, max: null, step: 1 },
];

export interface ValidationFailure {
  key: ControlKey;
  message: string;
}

export function validateControlValue(
  spec: ControlSpec,
  value: number,
): ValidationFailure | null {
  if (!Number.isFinite(value)) {
    return { key: spec.key, message: `${spec.key} must be a number` };
  }
  if (spec.kind === "integer" && !Number.isInteger(value)) {
    return { key: spec.key, message: `${spec.key} must be an integer` };
  }
  if (value < spec.min || (spec.max !== null && value > spec.max)) {
    const upper = spec.max === null ? "" : ` and at most ${spec.max}`;
    return {
      key: spec.key,
      message: `${spec.key} must be at least ${spec.min}${upper}`,
    };
  }
  return null;
}

/** Validate a patch against the control table; a failure means nothing
 *  should be sent to the session. */
export function validatePatch(
  patch: Partial<Record<ControlKey, number>>,
): ValidationFailure[] {
  const failures: ValidationFailure[] = [];
  for (const spec of CONTROLS) {
    const value = patch[spec.key];
    if (value === undefined) continue;
    const failure = validateControlValue(spec, value);
    if (failure) failures.push(failure);
  }
  return failures;
}

export function validateSpeed(value: number | null): string | null {
  if (value === null) return null; // unthrottled
  if (!Number.isFinite(value) || value <= 0) {
    return "speed must be a positive number of iterations per second";
  }
  return null;
}

let tagCounter = 0;

/** Monotone client tags so pending patches can be matched to acks. */
export function nextClientTag(): string {
  tagCounter += 1;
  return `ui-${tagCounter}`;
}
