/**
 * Wire-format documents exchanged with the nettingdesk service.
 *
 * Only fields the UI actually reads are typed; documents are otherwise carried
 * opaquely so round-tripping them back to the service never drops anything.
 */

export interface Term {
  id: string;
  surface: string;
}

export type Polarity = "Positive" | "Negated";

export interface VerbTerm extends Term {
  polarity: Polarity;
}

export interface VocabularyDoc {
  version: number;
  objects: Term[];
  predicates: Term[];
  likelihoods: Term[];
  verbs: VerbTerm[];
}

export interface SentenceDoc {
  likelihood: string;
  object: string;
  verb: string;
  polarity: Polarity;
  predicate: string;
  text: string;
}

/** Probability range in integer basis points; the empty range is a distinct shape. */
export type RangeDoc = { loBp: number; hiBp: number } | { empty: true };

export interface MappingEntryDoc {
  loPercent: number;
  hiPercent: number;
}

export interface PolicyFactorDoc {
  id: string;
  object: string;
  predicate: string;
  adverseDirection: "OccurrenceAdverse" | "NonOccurrenceAdverse";
  weightBp: number;
}

export interface PolicyDoc {
  schemaVersion: number;
  id: string;
  mapping: Record<string, MappingEntryDoc>;
  factors: PolicyFactorDoc[];
  thresholdBp: number;
  missingFactorPolicy: string;
  emptyIntersectionPolicy: string;
  validityPeriodDays: number;
  blockingAnnotations: string[];
  aggregation: string;
}

export type Annotation = "Positive" | "Neutral" | "Negative" | "Missing";
export type Verification = "Unverified" | "Verified" | "Failed" | "Waived";

export interface ReviewItemDoc {
  id: string;
  kind: string;
  text: string;
  annotation: Annotation;
  verification: Verification;
  verifiedBy: string | null;
  verifiedAt: string | null;
}

export interface OpinionDoc {
  schemaVersion: number;
  id: string;
  lawFirm: string;
  issuedAt: string;
  isUpdateOf: string | null;
  scope: Record<string, unknown>;
  assumptions: ReviewItemDoc[];
  qualifications: ReviewItemDoc[];
  discussion: string;
  conclusion: string[];
  registryVersion: number;
}

export interface AssessmentDoc {
  schemaVersion: number;
  id: string;
  analystId: string;
  assessedAt: string;
  verdict: string;
  notes: string;
}

export interface BlockingReasonDoc {
  reasonId: string;
  detail: string;
}

export interface SentenceUseDoc {
  text: string;
  directed: RangeDoc;
}

export interface FactorAssessmentDoc {
  factorId: string;
  status: "Assessed" | "Missing" | "Contradictory";
  sentencesUsed: SentenceUseDoc[];
  adverseRange: RangeDoc;
  resolution: string | null;
}

export interface DeterminationDoc {
  schemaVersion: number;
  relationshipId: string;
  asOfDate: string;
  determinedAt: string;
  flag: "Yes" | "No";
  overallRisk: RangeDoc;
  blockingReasons: BlockingReasonDoc[];
  factorAssessments: FactorAssessmentDoc[];
  opinionIds: string[];
  policy: PolicyDoc;
  humanAssessment: Record<string, unknown>;
  trace: Record<string, unknown>;
}

export interface ReasonsDoc {
  errorReasonIds: string[];
  blockingReasonIds: string[];
}

export interface SaveResultDoc {
  id: string;
  version: number;
}

export interface VersionsDoc {
  id: string;
  versions: number[];
  latest: number;
}

export interface AuditVerifyDoc {
  valid: boolean;
  entries: number;
  brokenAt: number | null;
}

export interface DetermineResultDoc {
  relationshipId: string;
  version: number;
  determination: DeterminationDoc;
}

export type DocumentKind =
  | "opinions"
  | "policies"
  | "facts"
  | "assessments"
  | "determinations"
  | "registries";
