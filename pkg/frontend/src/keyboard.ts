// Keyboard-first verdict entry: labeling is a rapid ternary decision, so
// each verdict is one keystroke. Left/A = first class, right/B = second,
// down/S = cannot tell (skip).

import type { Verdict } from "./api.js";

const BINDINGS: Record<string, Verdict> = {
  a: 1,
  arrowleft: 1,
  b: -1,
  arrowright: -1,
  s: "skip",
  arrowdown: "skip",
};

export function verdictForKey(key: string): Verdict | null {
  return BINDINGS[key.toLowerCase()] ?? null;
}
