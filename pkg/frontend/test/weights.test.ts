import { describe, expect, it } from "vitest";

import { renormalizeWeights, weightsAreNormalized } from "../src/weights.js";
import { randomInt, seededRandom } from "./seeded.js";

describe("renormalizeWeights", () => {
  it("keeps an already-normalized vector unchanged", () => {
    expect(renormalizeWeights([5000, 3000, 2000])).toEqual([5000, 3000, 2000]);
    expect(renormalizeWeights([10000])).toEqual([10000]);
  });

  it("scales proportionally and lands exactly on 10000", () => {
    expect(renormalizeWeights([1, 1])).toEqual([5000, 5000]);
    expect(renormalizeWeights([2, 1, 1])).toEqual([5000, 2500, 2500]);
    expect(renormalizeWeights([1, 1, 1])).toEqual([3334, 3333, 3333]);
    expect(renormalizeWeights([0, 7])).toEqual([0, 10000]);
  });

  it("hands leftovers to the largest remainders, earliest index first on ties", () => {
    // 10000/6 = 1666 r 4: four of the six equal weights get the extra unit
    expect(renormalizeWeights([1, 1, 1, 1, 1, 1])).toEqual([1667, 1667, 1667, 1667, 1666, 1666]);
  });

  it("rejects unusable vectors", () => {
    expect(() => renormalizeWeights([])).toThrow(RangeError);
    expect(() => renormalizeWeights([0, 0])).toThrow(RangeError);
    expect(() => renormalizeWeights([-1, 2])).toThrow(RangeError);
    expect(() => renormalizeWeights([1.5, 2])).toThrow(RangeError);
    expect(() => renormalizeWeights([10_000_001])).toThrow(RangeError);
  });

  it("always sums to exactly 10000 and preserves order and zeroes (2000 random vectors)", () => {
    const next = seededRandom(20250901);
    for (let round = 0; round < 2000; round += 1) {
      const size = randomInt(next, 1, 12);
      const raw: number[] = Array.from({ length: size }, () => randomInt(next, 0, 20000));
      if (raw.reduce((a, b) => a + b, 0) === 0) raw[0] = 1;

      const result = renormalizeWeights(raw);
      expect(weightsAreNormalized(result)).toBe(true);
      expect(result).toHaveLength(raw.length);
      for (let i = 0; i < raw.length; i += 1) {
        if (raw[i] === 0) expect(result[i]).toBe(0);
      }
      // proportional within one smallest unit of the target scale
      const total = raw.reduce((a, b) => a + b, 0);
      for (let i = 0; i < raw.length; i += 1) {
        expect(Math.abs(result[i] * total - raw[i] * 10000)).toBeLessThan(total);
      }
      // renormalizing is idempotent
      expect(renormalizeWeights(result)).toEqual(result);
    }
  });
});
