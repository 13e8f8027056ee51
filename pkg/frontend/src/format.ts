/**
 * Display formatting for service-provided values.
 *
 * These helpers only re-shape integers the service already computed — integer
 * division and digit padding, never risk arithmetic.
 */

import type { RangeDoc } from "./types.js";

/** 7450 → "74.5%", 100 → "1%", 5 → "0.05%". Mirrors the service's own rendering. */
export function formatBp(bp: number): string {
  if (!Number.isInteger(bp) || bp < 0 || bp > 10000) {
    throw new RangeError(`basis points out of range: ${bp}`);
  }
  const whole = Math.floor(bp / 100);
  const cents = bp % 100;
  if (cents === 0) return `${whole}%`;
  if (cents % 10 === 0) return `${whole}.${cents / 10}%`;
  return `${whole}.${String(cents).padStart(2, "0")}%`;
}

export function formatRange(range: RangeDoc): string {
  if ("empty" in range) return "(empty)";
  return `${formatBp(range.loBp)}-${formatBp(range.hiBp)}`;
}
