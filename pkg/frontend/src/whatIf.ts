/**
 * What-if panel model: edit factor weights, the decision threshold and the
 * likelihood mapping locally, then ask the service to recompute.
 *
 * The panel performs no risk arithmetic of its own — the only numbers it ever
 * produces are request inputs (weights renormalized to exactly 10,000 bp);
 * every displayed figure is lifted verbatim from the latest service response.
 */

import { ApiClient, ApiError, WhatIfResult } from "./api.js";
import { renormalizeWeights } from "./weights.js";
import type {
  BlockingReasonDoc,
  DeterminationDoc,
  FactorAssessmentDoc,
  MappingEntryDoc,
  PolicyDoc,
  RangeDoc,
} from "./types.js";

/** Scenario inputs forwarded untouched to /whatif — inline documents or store ids. */
export interface ScenarioInputs {
  facts?: Record<string, unknown>;
  factsId?: string;
  opinions?: Array<Record<string, unknown>>;
  opinionIds?: string[];
  assessment?: Record<string, unknown>;
  assessmentId?: string;
  asOfDate: string;
}

export interface WhatIfDisplay {
  flag: "Yes" | "No";
  overallRisk: RangeDoc;
  factors: FactorAssessmentDoc[];
  blockingReasons: BlockingReasonDoc[];
  determinedAt: string;
  relationshipId: string;
}

export class WhatIfPanel {
  private readonly rawWeights: Map<string, number>;
  private thresholdBp: number;
  private readonly mappingOverrides = new Map<string, MappingEntryDoc>();
  private lastRun: WhatIfResult | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly basePolicy: PolicyDoc,
    private readonly inputs: ScenarioInputs,
    private readonly basePolicyVersion?: number,
  ) {
    this.rawWeights = new Map(basePolicy.factors.map((factor) => [factor.id, factor.weightBp]));
    this.thresholdBp = basePolicy.thresholdBp;
  }

  factorIds(): string[] {
    return this.basePolicy.factors.map((factor) => factor.id);
  }

  setWeight(factorId: string, value: number): void {
    if (!this.rawWeights.has(factorId)) {
      throw new RangeError(`unknown factor id: ${factorId}`);
    }
    if (!Number.isInteger(value) || value < 0) {
      throw new RangeError(`weight must be a non-negative integer, got ${value}`);
    }
    this.rawWeights.set(factorId, value);
  }

  setThreshold(bp: number): void {
    if (!Number.isInteger(bp) || bp < 0 || bp > 10000) {
      throw new RangeError(`threshold must be an integer in 0..10000, got ${bp}`);
    }
    this.thresholdBp = bp;
  }

  setMappingOverride(likelihoodId: string, entry: MappingEntryDoc): void {
    if (!(likelihoodId in this.basePolicy.mapping)) {
      throw new RangeError(`unknown likelihood id: ${likelihoodId}`);
    }
    this.mappingOverrides.set(likelihoodId, entry);
  }

  clearMappingOverride(likelihoodId: string): void {
    this.mappingOverrides.delete(likelihoodId);
  }

  /** The weights that would actually be submitted: always summing 10,000 bp. */
  effectiveWeights(): Map<string, number> {
    const ids = this.factorIds();
    const normalized = renormalizeWeights(ids.map((id) => this.rawWeights.get(id) ?? 0));
    return new Map(ids.map((id, index) => [id, normalized[index]]));
  }

  /** The base policy with the panel's edits applied — what persist() will save. */
  effectivePolicy(): PolicyDoc {
    const weights = this.effectiveWeights();
    const mapping = { ...this.basePolicy.mapping };
    for (const [likelihoodId, entry] of this.mappingOverrides) {
      mapping[likelihoodId] = entry;
    }
    return {
      ...this.basePolicy,
      factors: this.basePolicy.factors.map((factor) => ({
        ...factor,
        weightBp: weights.get(factor.id) ?? factor.weightBp,
      })),
      thresholdBp: this.thresholdBp,
      mapping,
    };
  }

  async run(): Promise<DeterminationDoc> {
    const effective = this.effectivePolicy();
    const body: Record<string, unknown> = {
      ...this.inputs,
      policy: this.basePolicy,
      policyOverrides: {
        factors: effective.factors,
        thresholdBp: effective.thresholdBp,
        mapping: effective.mapping,
      },
    };
    this.lastRun = await this.api.whatIf(body);
    return this.lastRun.doc;
  }

  lastTrace(): DeterminationDoc | null {
    return this.lastRun?.doc ?? null;
  }

  /** The canonical trace exactly as the service sent it, for export. */
  rawTrace(): string | null {
    return this.lastRun?.raw ?? null;
  }

  /** Values for the view — each one plucked from the last response, never derived. */
  display(): WhatIfDisplay | null {
    const doc = this.lastTrace();
    if (doc === null) return null;
    return {
      flag: doc.flag,
      overallRisk: doc.overallRisk,
      factors: doc.factorAssessments,
      blockingReasons: doc.blockingReasons,
      determinedAt: doc.determinedAt,
      relationshipId: doc.relationshipId,
    };
  }

  /**
   * Commit the edited policy and a fresh determination. Returns the stored
   * versions; a 409 (someone else moved the policy) is reported as a plain
   * conflict for the view's "reload and retry" banner.
   */
  async persist(): Promise<{ policyVersion: number; determinationVersion: number; relationshipId: string }> {
    const effective = this.effectivePolicy();
    let policyVersion: number;
    try {
      const saved = await this.api.saveDocument("policies", effective, this.basePolicyVersion);
      policyVersion = saved.version;
    } catch (error) {
      if (error instanceof ApiError && error.isConflict) {
        throw new ApiError(error.status, error.reasonId, "policy changed elsewhere — reload and retry");
      }
      throw error;
    }
    const result = await this.api.determine({ ...this.inputs, policyId: effective.id });
    return {
      policyVersion,
      determinationVersion: result.version,
      relationshipId: result.relationshipId,
    };
  }
}
