/**
 * Human-readable messages for the service's blocking-reason ids.
 *
 * The key set and order mirror the service's stable enum exactly; a contract
 * test compares them against GET /reasons so drift cannot go unnoticed.
 */

export const BLOCKING_REASON_MESSAGES = {
  ScopeNotMatched: "No supplied opinion matches the relationship's scope.",
  JurisdictionNotCovered: "A required jurisdiction is not covered by any scope-matched opinion.",
  MaterialAmendment: "The agreement has been materially amended since the opinion was given.",
  ItemVerificationFailed: "An assumption or qualification failed verification.",
  BlockingItemUnverified: "An item with a blocking annotation has not been reviewed.",
  OpinionExpired: "A supporting opinion is older than the policy's validity period.",
  MissingFactor: "A policy factor has no matching conclusion sentence.",
  ContradictoryFactor: "The conclusion sentences for a factor contradict each other.",
  ReasoningNotAccepted: "The human assessment did not accept the opinion's reasoning.",
  RiskAboveThreshold: "The aggregate risk upper bound exceeds the policy threshold.",
} as const;

export type BlockingReasonId = keyof typeof BLOCKING_REASON_MESSAGES;

export const BLOCKING_REASON_ORDER = Object.keys(BLOCKING_REASON_MESSAGES) as BlockingReasonId[];

export function describeReason(reasonId: string, detail?: string): string {
  const message = (BLOCKING_REASON_MESSAGES as Record<string, string>)[reasonId] ?? reasonId;
  return detail ? `${message} (${detail})` : message;
}
