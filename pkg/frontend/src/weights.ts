/**
 * Factor-weight renormalization for the what-if panel.
 *
 * The service rejects any policy whose factor weights do not sum to exactly
 * 10,000 bp, so the panel funnels every weight edit through this largest-
 * remainder renormalization before anything can be submitted. All arithmetic
 * is on integers small enough to stay exact.
 */

const TOTAL_BP = 10000;
const MAX_RAW_WEIGHT = 10_000_000;

/**
 * Scale non-negative integer weights proportionally so they sum to exactly
 * 10,000, distributing rounding leftovers to the largest remainders (ties go
 * to the earliest factor). A vector that already sums to 10,000 is returned
 * unchanged.
 */
export function renormalizeWeights(raw: readonly number[]): number[] {
  if (raw.length === 0) {
    throw new RangeError("at least one weight is required");
  }
  for (const value of raw) {
    if (!Number.isInteger(value) || value < 0 || value > MAX_RAW_WEIGHT) {
      throw new RangeError(`weights must be integers in 0..${MAX_RAW_WEIGHT}, got ${value}`);
    }
  }
  const total = raw.reduce((sum, value) => sum + value, 0);
  if (total === 0) {
    throw new RangeError("weights must include at least one positive entry");
  }
  const scaled = raw.map((value) => value * TOTAL_BP);
  const result = scaled.map((value) => Math.floor(value / total));
  let leftover = TOTAL_BP - result.reduce((sum, value) => sum + value, 0);
  const byRemainder = scaled
    .map((value, index) => ({ remainder: value % total, index }))
    .sort((a, b) => b.remainder - a.remainder || a.index - b.index);
  for (const { index } of byRemainder) {
    if (leftover === 0) break;
    result[index] += 1;
    leftover -= 1;
  }
  return result;
}

export function weightsAreNormalized(weights: readonly number[]): boolean {
  return (
    weights.length > 0 &&
    weights.every((value) => Number.isInteger(value) && value >= 0) &&
    weights.reduce((sum, value) => sum + value, 0) === TOTAL_BP
  );
}
