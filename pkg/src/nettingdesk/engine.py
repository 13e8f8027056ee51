"""Netting determinations: weighted interval risk plus hard compliance gates.

The numeric half is interval arithmetic. Each policy factor collects the
conclusion sentences that speak about its object/predicate pair, maps their
likelihood phrases to probability ranges, intersects those, and orients the
result so that a higher number always means a worse outcome. Factor ranges
are then combined as a weighted bound-wise sum and the upper bound compared
against the institution's threshold — the worst case inside the stated legal
uncertainty has to be tolerable, not the best.

The gating half is boolean. Scope match, jurisdiction coverage, item
verification, opinion age, and a recorded human verdict on the legal
reasoning must all pass before the risk number is even allowed to say Yes.
A No always lists every failed condition, and the full computation trace is
embedded in the result so a reviewer can replay it.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import date
from enum import Enum

from .cnl import Polarity, Sentence, sentence_text
from .documents import as_int, as_list, as_opt_str, as_str, as_str_list, require
from .errors import OpinionNotFound, PolicyInvalid, SchemaInvalid, UnresolvedFactor
from .opinions import (
    Annotation,
    HumanAssessment,
    LegalOpinion,
    RelationshipFacts,
    Verdict,
    Verification,
    check_jurisdiction_coverage,
    match_scope,
)
from .ranges import EMPTY, FULL, SCALE_BP, LikelihoodMapping, ProbRange, complement, intersect, map_likelihood

SCHEMA_VERSION = 1

#: Everything that can force a No, in the order gates are evaluated.
BLOCKING_REASON_IDS = (
    "ScopeNotMatched",
    "JurisdictionNotCovered",
    "MaterialAmendment",
    "ItemVerificationFailed",
    "BlockingItemUnverified",
    "OpinionExpired",
    "MissingFactor",
    "ContradictoryFactor",
    "ReasoningNotAccepted",
    "RiskAboveThreshold",
)


class AdverseDirection(Enum):
    """Which way the factor's predicate hurts.

    OCCURRENCE: the predicate happening is the bad case (cherry-picking).
    NON_OCCURRENCE: the predicate failing is the bad case (enforceability).
    """

    OCCURRENCE = "OccurrenceAdverse"
    NON_OCCURRENCE = "NonOccurrenceAdverse"


class MissingFactorPolicy(Enum):
    TREAT_AS_UNKNOWN = "TreatAsUnknown"
    BLOCK = "Block"


class EmptyIntersectionPolicy(Enum):
    BLOCK = "Block"
    WIDEST_SENTENCE = "WidestSentence"


class FactorStatus(Enum):
    ASSESSED = "Assessed"
    MISSING = "Missing"
    CONTRADICTORY = "Contradictory"


def _enum_from(value, enum_cls, field: str):
    for member in enum_cls:
        if member.value == value:
            return member
    raise SchemaInvalid(f"{field!r} must be one of {[m.value for m in enum_cls]}, got {value!r}")


@dataclass(frozen=True)
class RiskFactor:
    id: str
    object_id: str
    predicate_id: str
    adverse_direction: AdverseDirection
    weight_bp: int

    def to_document(self) -> dict:
        return {
            "id": self.id,
            "object": self.object_id,
            "predicate": self.predicate_id,
            "adverseDirection": self.adverse_direction.value,
            "weightBp": self.weight_bp,
        }

    @classmethod
    def from_document(cls, doc: dict) -> "RiskFactor":
        object_id = as_str(require(doc, "object"), "factor.object")
        predicate_id = as_str(require(doc, "predicate"), "factor.predicate")
        ident = as_opt_str(doc.get("id"), "factor.id") or f"{object_id}:{predicate_id}"
        return cls(
            id=ident,
            object_id=object_id,
            predicate_id=predicate_id,
            adverse_direction=_enum_from(require(doc, "adverseDirection"), AdverseDirection, "factor.adverseDirection"),
            weight_bp=as_int(require(doc, "weightBp"), "factor.weightBp"),
        )


#: Pluggable range-combination strategies. Only the linear weighted sum
#: ships; a polynomial combiner would register here under its own name.
AGGREGATORS: dict = {}

DEFAULT_BLOCKING_ANNOTATIONS = frozenset({Annotation.NEGATIVE.value})


@dataclass(frozen=True)
class RiskPolicy:
    """An institution's risk appetite, fixed before any determination runs."""

    mapping: LikelihoodMapping
    factors: tuple
    threshold_bp: int
    missing_factor_policy: MissingFactorPolicy = MissingFactorPolicy.TREAT_AS_UNKNOWN
    empty_intersection_policy: EmptyIntersectionPolicy = EmptyIntersectionPolicy.BLOCK
    validity_period_days: int = 365
    blocking_annotations: frozenset = DEFAULT_BLOCKING_ANNOTATIONS
    aggregation: str = "linear-sum"
    id: str = "policy"

    def __post_init__(self) -> None:
        if not self.factors:
            raise PolicyInvalid("policy needs at least one factor")
        total = sum(f.weight_bp for f in self.factors)
        if total != SCALE_BP:
            raise PolicyInvalid(f"factor weights must sum to {SCALE_BP} bp, got {total}")
        for factor in self.factors:
            if factor.weight_bp < 0:
                raise PolicyInvalid(f"factor {factor.id!r} has negative weight")
        pairs = [(f.object_id, f.predicate_id) for f in self.factors]
        if len(set(pairs)) != len(pairs):
            raise PolicyInvalid("factor (object, predicate) pairs must be unique")
        ids = [f.id for f in self.factors]
        if len(set(ids)) != len(ids):
            raise PolicyInvalid("factor ids must be unique")
        if not 0 <= self.threshold_bp <= SCALE_BP:
            raise PolicyInvalid(f"thresholdBp must lie in [0, {SCALE_BP}], got {self.threshold_bp}")
        if self.validity_period_days < 0:
            raise PolicyInvalid("validityPeriodDays must be >= 0")
        allowed_annotations = {member.value for member in Annotation}
        for annotation in self.blocking_annotations:
            if annotation not in allowed_annotations:
                raise PolicyInvalid(
                    f"blockingAnnotations must use {sorted(allowed_annotations)}, got {annotation!r}"
                )
        if self.aggregation not in AGGREGATORS:
            raise PolicyInvalid(f"unknown aggregation {self.aggregation!r}")

    def to_document(self) -> dict:
        return {
            "schemaVersion": SCHEMA_VERSION,
            "id": self.id,
            "mapping": self.mapping.to_document(),
            "factors": [f.to_document() for f in self.factors],
            "thresholdBp": self.threshold_bp,
            "missingFactorPolicy": self.missing_factor_policy.value,
            "emptyIntersectionPolicy": self.empty_intersection_policy.value,
            "validityPeriodDays": self.validity_period_days,
            "blockingAnnotations": sorted(self.blocking_annotations),
            "aggregation": self.aggregation,
        }

    @classmethod
    def from_document(cls, doc: dict) -> "RiskPolicy":
        if "schemaVersion" in doc and as_int(doc["schemaVersion"], "schemaVersion") != SCHEMA_VERSION:
            raise SchemaInvalid(f"unsupported schemaVersion {doc.get('schemaVersion')!r}")
        blocking = doc.get("blockingAnnotations")
        return cls(
            mapping=LikelihoodMapping.from_document(require(doc, "mapping")),
            factors=tuple(RiskFactor.from_document(entry) for entry in as_list(require(doc, "factors"), "factors")),
            threshold_bp=as_int(require(doc, "thresholdBp"), "thresholdBp"),
            missing_factor_policy=_enum_from(
                doc.get("missingFactorPolicy", "TreatAsUnknown"), MissingFactorPolicy, "missingFactorPolicy"
            ),
            empty_intersection_policy=_enum_from(
                doc.get("emptyIntersectionPolicy", "Block"), EmptyIntersectionPolicy, "emptyIntersectionPolicy"
            ),
            validity_period_days=as_int(doc.get("validityPeriodDays", 365), "validityPeriodDays"),
            blocking_annotations=(
                DEFAULT_BLOCKING_ANNOTATIONS if blocking is None
                else frozenset(as_str_list(blocking, "blockingAnnotations"))
            ),
            aggregation=as_str(doc.get("aggregation", "linear-sum"), "aggregation"),
            id=as_opt_str(doc.get("id"), "id") or "policy",
        )


@dataclass(frozen=True)
class SentenceUse:
    """One conclusion sentence as a factor saw it: text plus P(predicate holds)."""

    text: str
    directed: ProbRange

    def to_document(self) -> dict:
        return {"text": self.text, "directed": self.directed.to_document()}


@dataclass(frozen=True)
class FactorAssessment:
    factor_id: str
    sentences_used: tuple
    status: FactorStatus
    adverse_range: ProbRange | None
    resolution: str | None = None

    def __post_init__(self) -> None:
        if self.status is FactorStatus.ASSESSED and self.adverse_range is None:
            raise SchemaInvalid("an assessed factor must carry a range")

    def to_document(self) -> dict:
        return {
            "factorId": self.factor_id,
            "status": self.status.value,
            "sentencesUsed": [use.to_document() for use in self.sentences_used],
            "adverseRange": None if self.adverse_range is None else self.adverse_range.to_document(),
            "resolution": self.resolution,
        }


def factor_range(conclusion, factor: RiskFactor, mapping: LikelihoodMapping) -> FactorAssessment:
    """Assess one factor against the conclusion sentences.

    Each matching sentence contributes a range for "the predicate holds"
    (negated verbs contribute the complement); the ranges are intersected,
    then the intersection is flipped for non-occurrence-adverse factors so
    the result is always P(the bad thing happens). No sentences is Missing,
    a disjoint intersection is Contradictory — statuses, not errors.
    """
    uses = []
    meet = None
    for sentence in conclusion:
        if sentence.object.id != factor.object_id or sentence.predicate.id != factor.predicate_id:
            continue
        raw = map_likelihood(sentence.likelihood, mapping)
        directed = raw if sentence.verb.polarity is Polarity.POSITIVE else complement(raw)
        uses.append(SentenceUse(text=sentence_text(sentence), directed=directed))
        if meet is not EMPTY:
            meet = directed if meet is None else intersect(meet, directed)
    if not uses:
        return FactorAssessment(factor.id, (), FactorStatus.MISSING, None)
    if meet is EMPTY:
        return FactorAssessment(factor.id, tuple(uses), FactorStatus.CONTRADICTORY, None)
    adverse = meet if factor.adverse_direction is AdverseDirection.OCCURRENCE else complement(meet)
    return FactorAssessment(factor.id, tuple(uses), FactorStatus.ASSESSED, adverse)


def _resolve(assessment: FactorAssessment, factor: RiskFactor, policy: RiskPolicy):
    """Apply the policy's Missing/Contradictory handling to one assessment.

    Returns (assessment, warning, blocking reason id); the reason id is None
    when the factor ends up usable.
    """
    if assessment.status is FactorStatus.ASSESSED:
        return assessment, None, None
    if assessment.status is FactorStatus.MISSING:
        if policy.missing_factor_policy is MissingFactorPolicy.TREAT_AS_UNKNOWN:
            resolved = replace(assessment, adverse_range=FULL, resolution="TreatAsUnknown")
            return resolved, f"factor {factor.id}: no matching sentence; treated as unknown [0%,100%]", None
        return assessment, None, "MissingFactor"
    # Contradictory: the sentences for this factor have no common ground.
    if policy.empty_intersection_policy is EmptyIntersectionPolicy.WIDEST_SENTENCE:
        widest = max(assessment.sentences_used, key=lambda use: use.directed.width())
        adverse = (
            widest.directed
            if factor.adverse_direction is AdverseDirection.OCCURRENCE
            else complement(widest.directed)
        )
        resolved = replace(assessment, adverse_range=adverse, resolution="WidestSentence")
        return resolved, f"factor {factor.id}: contradictory sentences; kept widest {widest.text!r}", None
    return assessment, None, "ContradictoryFactor"


def _linear_sum(assessments, policy: RiskPolicy) -> ProbRange:
    weight_of = {f.id: f.weight_bp for f in policy.factors}
    by_id = {a.factor_id: a for a in assessments}
    lo_sum = 0
    hi_sum = 0
    for factor in policy.factors:
        assessment = by_id.get(factor.id)
        if assessment is None or assessment.adverse_range is None:
            raise UnresolvedFactor(factor.id)
        lo_sum += weight_of[factor.id] * assessment.adverse_range.lo
        hi_sum += weight_of[factor.id] * assessment.adverse_range.hi
    # Floor below, ceiling above: rounding may never shrink the interval.
    return ProbRange(lo_sum // SCALE_BP, -(-hi_sum // SCALE_BP))


AGGREGATORS["linear-sum"] = _linear_sum


def aggregate_risk(assessments, policy: RiskPolicy) -> ProbRange:
    """Combine resolved factor ranges into the overall adverse-risk range."""
    return AGGREGATORS[policy.aggregation](assessments, policy)


@dataclass(frozen=True)
class BlockingReason:
    reason_id: str
    detail: str

    def to_document(self) -> dict:
        return {"reasonId": self.reason_id, "detail": self.detail}


@dataclass(frozen=True)
class NettingDetermination:
    relationship_id: str
    opinion_ids: tuple
    flag: str  # "Yes" | "No"
    overall_risk: ProbRange
    factor_assessments: tuple
    policy: RiskPolicy
    human_assessment: HumanAssessment
    blocking_reasons: tuple
    determined_at: str
    as_of_date: str
    trace: dict

    def to_document(self) -> dict:
        return {
            "schemaVersion": SCHEMA_VERSION,
            "relationshipId": self.relationship_id,
            "opinionIds": list(self.opinion_ids),
            "flag": self.flag,
            "overallRisk": self.overall_risk.to_document(),
            "factorAssessments": [a.to_document() for a in self.factor_assessments],
            "policy": self.policy.to_document(),
            "humanAssessment": self.human_assessment.to_document(),
            "blockingReasons": [r.to_document() for r in self.blocking_reasons],
            "determinedAt": self.determined_at,
            "asOfDate": self.as_of_date,
            "trace": self.trace,
        }


def determine(
    facts: RelationshipFacts,
    opinions,
    policy: RiskPolicy,
    human_assessment: HumanAssessment,
    as_of_date: date,
) -> NettingDetermination:
    """Run every gate and the risk aggregation for one trading relationship.

    Yes requires all of: a scope-matched opinion, full jurisdiction coverage,
    clean item verification, no material amendment, opinions within their
    validity period, an accepting human verdict, and an aggregate risk upper
    bound at or under the threshold. Anything else is No, with every failed
    gate listed. The result is pure data: identical inputs give an identical
    document, byte for byte (``determinedAt`` is the as-of date, not a wall
    clock, for exactly that reason).
    """
    opinions = list(opinions)
    if not opinions:
        raise OpinionNotFound("no opinions supplied")
    seen = set()
    for opinion in opinions:
        if opinion.id in seen:
            raise SchemaInvalid(f"duplicate opinion id {opinion.id!r}")
        seen.add(opinion.id)

    blocking = []

    # Gate (a): the facts must fall inside at least one opinion's scope.
    scope_results = [(op, match_scope(op, facts)) for op in opinions]
    matched = [op for op, result in scope_results if result.overall]
    if not matched:
        blocking.append(BlockingReason("ScopeNotMatched", "no supplied opinion covers the relationship facts"))

    # Gate (b): every required jurisdiction must be covered by some opinion.
    coverage = check_jurisdiction_coverage(opinions, facts)
    if not coverage.covered:
        blocking.append(
            BlockingReason("JurisdictionNotCovered", "uncovered: " + ", ".join(coverage.uncovered))
        )

    # Gate (c): item review. A material amendment voids the standard
    # no-alterations assumption outright; Failed items always block; items
    # whose annotation the policy marks blocking must be Verified or Waived.
    if facts.materially_amended:
        blocking.append(
            BlockingReason("MaterialAmendment", f"relationship {facts.relationship_id} flagged as materially amended")
        )
    failed = sorted(
        f"{op.id}/{item.id}"
        for op in opinions
        for item in op.items()
        if item.verification is Verification.FAILED
    )
    if failed:
        blocking.append(BlockingReason("ItemVerificationFailed", "failed: " + ", ".join(failed)))
    unverified = sorted(
        f"{op.id}/{item.id}"
        for op in opinions
        for item in op.items()
        if item.annotation.value in policy.blocking_annotations and item.verification is Verification.UNVERIFIED
    )
    if unverified:
        blocking.append(BlockingReason("BlockingItemUnverified", "unverified blocking items: " + ", ".join(unverified)))

    # Gate (d): age. Every supplied opinion must still be inside the validity
    # window on the as-of date.
    expired = sorted(
        op.id for op in opinions if (as_of_date - op.issued_at).days > policy.validity_period_days
    )
    if expired:
        blocking.append(
            BlockingReason(
                "OpinionExpired",
                f"older than {policy.validity_period_days} days: " + ", ".join(expired),
            )
        )

    # Risk: sentences come only from scope-matched opinions, in supply order.
    conclusion = [sentence for op in matched for sentence in op.conclusion]
    raw_assessments = [factor_range(conclusion, factor, policy.mapping) for factor in policy.factors]
    assessments = []
    warnings = []
    unusable = {"MissingFactor": [], "ContradictoryFactor": []}
    for factor, assessment in zip(policy.factors, raw_assessments):
        resolved, warning, reason_id = _resolve(assessment, factor, policy)
        assessments.append(resolved)
        if warning:
            warnings.append(warning)
        if reason_id:
            unusable[reason_id].append(factor.id)
    for reason_id in ("MissingFactor", "ContradictoryFactor"):
        if unusable[reason_id]:
            blocking.append(BlockingReason(reason_id, "factors: " + ", ".join(unusable[reason_id])))

    # For the trace, unusable factors count as fully unknown; the blocking
    # reason above already forces the flag to No.
    reportable = [
        a if a.adverse_range is not None else replace(a, adverse_range=FULL, resolution="WorstCasePlaceholder")
        for a in assessments
    ]
    overall = aggregate_risk(reportable, policy)

    # Gate (e): a person must have accepted the written legal reasoning.
    if human_assessment.verdict is not Verdict.REASONING_ACCEPTABLE:
        blocking.append(
            BlockingReason("ReasoningNotAccepted", f"verdict {human_assessment.verdict.value} by {human_assessment.analyst_id}")
        )

    # Gate (f): worst case within the risk interval must be tolerable.
    if overall.hi > policy.threshold_bp:
        blocking.append(
            BlockingReason(
                "RiskAboveThreshold",
                f"risk upper bound {overall.hi} bp exceeds threshold {policy.threshold_bp} bp",
            )
        )

    trace = {
        "scopeMatches": {op.id: result.to_document() for op, result in scope_results},
        "scopeMatchedOpinionIds": [op.id for op in matched],
        "coverage": coverage.to_document(),
        "requiredJurisdictions": list(coverage.required),
        "opinionIssuedAt": {op.id: op.issued_at.isoformat() for op in opinions},
        "expiredOpinionIds": list(expired),
        "conclusionSentences": [sentence_text(s) for s in conclusion],
        "warnings": warnings,
    }

    return NettingDetermination(
        relationship_id=facts.relationship_id,
        opinion_ids=tuple(op.id for op in opinions),
        flag="No" if blocking else "Yes",
        overall_risk=overall,
        factor_assessments=tuple(reportable),
        policy=policy,
        human_assessment=human_assessment,
        blocking_reasons=tuple(blocking),
        determined_at=as_of_date.isoformat(),
        as_of_date=as_of_date.isoformat(),
        trace=trace,
    )
