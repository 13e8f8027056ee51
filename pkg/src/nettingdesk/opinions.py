"""Legal-opinion structure, relationship fact patterns, and coverage tests.

An opinion has five parts (scope, assumptions, qualifications, discussion,
conclusion). Discussion stays free text and is never machine-interpreted;
only a recorded human assessment gates on it. All values are immutable;
every mutation returns a new value for the store to version.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import date
from enum import Enum

from .cnl import Sentence, VocabularyRegistry, builtin_registry, sentence_from_document, sentence_to_document
from .documents import as_bool, as_date, as_int, as_list, as_opt_str, as_str, as_str_list, require
from .errors import SchemaInvalid, UnknownItem

SCHEMA_VERSION = 1

ASSUMPTION_KINDS = ("Factual", "AgreementRelated", "ConditionPrecedent")
QUALIFICATION_KINDS = ("General", "ScopeLimit", "JurisdictionRisk")


class Annotation(Enum):
    POSITIVE = "Positive"
    NEUTRAL = "Neutral"
    NEGATIVE = "Negative"
    MISSING = "Missing"


class Verification(Enum):
    UNVERIFIED = "Unverified"
    VERIFIED = "Verified"
    WAIVED = "Waived"
    FAILED = "Failed"


class Verdict(Enum):
    REASONING_ACCEPTABLE = "ReasoningAcceptable"
    REASONING_REJECTED = "ReasoningRejected"


def _enum_from(value, enum_cls, field: str):
    for member in enum_cls:
        if member.value == value:
            return member
    raise SchemaInvalid(f"{field!r} must be one of {[m.value for m in enum_cls]}, got {value!r}")


@dataclass(frozen=True)
class ReviewItem:
    """One assumption or qualification, with the institution's review state."""

    id: str
    kind: str
    text: str
    annotation: Annotation = Annotation.MISSING
    verification: Verification = Verification.UNVERIFIED
    verified_by: str | None = None
    verified_at: str | None = None

    def to_document(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "text": self.text,
            "annotation": self.annotation.value,
            "verification": self.verification.value,
            "verifiedBy": self.verified_by,
            "verifiedAt": self.verified_at,
        }

    @classmethod
    def from_document(cls, doc: dict, allowed_kinds, field: str) -> "ReviewItem":
        kind = as_str(require(doc, "kind"), f"{field}.kind")
        if kind not in allowed_kinds:
            raise SchemaInvalid(f"{field}.kind must be one of {allowed_kinds}, got {kind!r}")
        return cls(
            id=as_str(require(doc, "id"), f"{field}.id"),
            kind=kind,
            text=as_str(require(doc, "text"), f"{field}.text"),
            annotation=_enum_from(doc.get("annotation", "Missing"), Annotation, f"{field}.annotation"),
            verification=_enum_from(doc.get("verification", "Unverified"), Verification, f"{field}.verification"),
            verified_by=as_opt_str(doc.get("verifiedBy"), f"{field}.verifiedBy"),
            verified_at=as_opt_str(doc.get("verifiedAt"), f"{field}.verifiedAt"),
        )


@dataclass(frozen=True)
class OpinionScope:
    """What the opinion covers; empty transaction types means all."""

    agreement_types: frozenset
    governing_law: str
    jurisdictions: frozenset
    counterparty_types: frozenset
    transaction_types: frozenset

    def __post_init__(self) -> None:
        if not self.agreement_types:
            raise SchemaInvalid("scope.agreementTypes must be non-empty")
        if not self.governing_law:
            raise SchemaInvalid("scope.governingLaw must be present")

    def to_document(self) -> dict:
        return {
            "agreementTypes": sorted(self.agreement_types),
            "governingLaw": self.governing_law,
            "jurisdictions": sorted(self.jurisdictions),
            "counterpartyTypes": sorted(self.counterparty_types),
            "transactionTypes": sorted(self.transaction_types),
        }

    @classmethod
    def from_document(cls, doc: dict) -> "OpinionScope":
        return cls(
            agreement_types=frozenset(as_str_list(require(doc, "agreementTypes"), "scope.agreementTypes")),
            governing_law=as_str(require(doc, "governingLaw"), "scope.governingLaw"),
            jurisdictions=frozenset(as_str_list(require(doc, "jurisdictions"), "scope.jurisdictions")),
            counterparty_types=frozenset(as_str_list(require(doc, "counterpartyTypes"), "scope.counterpartyTypes")),
            transaction_types=frozenset(as_str_list(doc.get("transactionTypes", []), "scope.transactionTypes")),
        )


@dataclass(frozen=True)
class LegalOpinion:
    id: str
    law_firm: str
    issued_at: date
    scope: OpinionScope
    assumptions: tuple
    qualifications: tuple
    discussion: str
    conclusion: tuple
    registry_version: int = 1
    is_update_of: str | None = None

    def __post_init__(self) -> None:
        item_ids = [item.id for item in self.assumptions + self.qualifications]
        if len(set(item_ids)) != len(item_ids):
            raise SchemaInvalid("assumption/qualification ids must be unique within an opinion")

    def items(self) -> tuple:
        return self.assumptions + self.qualifications

    def find_item(self, item_id: str):
        for item in self.items():
            if item.id == item_id:
                return item
        return None

    def to_document(self, registry: VocabularyRegistry | None = None) -> dict:
        return {
            "schemaVersion": SCHEMA_VERSION,
            "id": self.id,
            "lawFirm": self.law_firm,
            "issuedAt": self.issued_at.isoformat(),
            "isUpdateOf": self.is_update_of,
            "scope": self.scope.to_document(),
            "assumptions": [item.to_document() for item in self.assumptions],
            "qualifications": [item.to_document() for item in self.qualifications],
            "discussion": self.discussion,
            "conclusion": [sentence_to_document(s, registry) for s in self.conclusion],
            "registryVersion": self.registry_version,
        }

    @classmethod
    def from_document(cls, doc: dict, registry: VocabularyRegistry | None = None, today: date | None = None) -> "LegalOpinion":
        if as_int(require(doc, "schemaVersion"), "schemaVersion") != SCHEMA_VERSION:
            raise SchemaInvalid(f"unsupported schemaVersion {doc.get('schemaVersion')!r}")
        if registry is None:
            registry = builtin_registry()
        issued_at = as_date(require(doc, "issuedAt"), "issuedAt")
        if today is not None and issued_at > today:
            raise SchemaInvalid(f"issuedAt {issued_at.isoformat()} is in the future")
        conclusion = tuple(
            sentence_from_document(entry, registry)
            for entry in as_list(require(doc, "conclusion"), "conclusion")
        )
        return cls(
            id=as_str(require(doc, "id"), "id"),
            law_firm=as_str(require(doc, "lawFirm"), "lawFirm"),
            issued_at=issued_at,
            is_update_of=as_opt_str(doc.get("isUpdateOf"), "isUpdateOf"),
            scope=OpinionScope.from_document(require(doc, "scope")),
            assumptions=tuple(
                ReviewItem.from_document(entry, ASSUMPTION_KINDS, "assumptions")
                for entry in as_list(require(doc, "assumptions"), "assumptions")
            ),
            qualifications=tuple(
                ReviewItem.from_document(entry, QUALIFICATION_KINDS, "qualifications")
                for entry in as_list(require(doc, "qualifications"), "qualifications")
            ),
            discussion=as_str(require(doc, "discussion"), "discussion"),
            conclusion=conclusion,
            registry_version=as_int(require(doc, "registryVersion"), "registryVersion"),
        )


@dataclass(frozen=True)
class RelationshipFacts:
    """The fact pattern for one trading relationship (one master agreement)."""

    counterparty_id: str
    counterparty_type: str
    incorporation_jurisdiction: str
    agreement_type: str
    agreement_governing_law: str
    transaction_governing_laws: frozenset
    transaction_types: frozenset
    collateral_locations: frozenset
    branch_jurisdiction: str | None = None
    materially_amended: bool = False
    relationship_id: str | None = None

    def __post_init__(self) -> None:
        if not self.incorporation_jurisdiction:
            raise SchemaInvalid("incorporationJurisdiction must be present")
        if self.relationship_id is None:
            object.__setattr__(self, "relationship_id", f"{self.counterparty_id}:{self.agreement_type}")

    def required_jurisdictions(self) -> frozenset:
        required = {self.incorporation_jurisdiction, self.agreement_governing_law}
        if self.branch_jurisdiction:
            required.add(self.branch_jurisdiction)
        required |= self.transaction_governing_laws
        return frozenset(required)

    def to_document(self) -> dict:
        return {
            "schemaVersion": SCHEMA_VERSION,
            "relationshipId": self.relationship_id,
            "counterpartyId": self.counterparty_id,
            "counterpartyType": self.counterparty_type,
            "incorporationJurisdiction": self.incorporation_jurisdiction,
            "branchJurisdiction": self.branch_jurisdiction,
            "agreementType": self.agreement_type,
            "agreementGoverningLaw": self.agreement_governing_law,
            "transactionGoverningLaws": sorted(self.transaction_governing_laws),
            "transactionTypes": sorted(self.transaction_types),
            "collateralLocations": sorted(self.collateral_locations),
            "materiallyAmended": self.materially_amended,
        }

    @classmethod
    def from_document(cls, doc: dict) -> "RelationshipFacts":
        if as_int(require(doc, "schemaVersion"), "schemaVersion") != SCHEMA_VERSION:
            raise SchemaInvalid(f"unsupported schemaVersion {doc.get('schemaVersion')!r}")
        return cls(
            counterparty_id=as_str(require(doc, "counterpartyId"), "counterpartyId"),
            counterparty_type=as_str(require(doc, "counterpartyType"), "counterpartyType"),
            incorporation_jurisdiction=as_str(require(doc, "incorporationJurisdiction"), "incorporationJurisdiction"),
            branch_jurisdiction=as_opt_str(doc.get("branchJurisdiction"), "branchJurisdiction"),
            agreement_type=as_str(require(doc, "agreementType"), "agreementType"),
            agreement_governing_law=as_str(require(doc, "agreementGoverningLaw"), "agreementGoverningLaw"),
            transaction_governing_laws=frozenset(as_str_list(require(doc, "transactionGoverningLaws"), "transactionGoverningLaws")),
            transaction_types=frozenset(as_str_list(doc.get("transactionTypes", []), "transactionTypes")),
            collateral_locations=frozenset(as_str_list(doc.get("collateralLocations", []), "collateralLocations")),
            materially_amended=as_bool(doc.get("materiallyAmended", False), "materiallyAmended"),
            relationship_id=as_opt_str(doc.get("relationshipId"), "relationshipId"),
        )


@dataclass(frozen=True)
class HumanAssessment:
    """Recorded sign-off on the legal reasoning; required before any Yes."""

    analyst_id: str
    assessed_at: str
    verdict: Verdict
    notes: str = ""

    def to_document(self) -> dict:
        return {
            "analystId": self.analyst_id,
            "assessedAt": self.assessed_at,
            "verdict": self.verdict.value,
            "notes": self.notes,
        }

    @classmethod
    def from_document(cls, doc: dict) -> "HumanAssessment":
        return cls(
            analyst_id=as_str(require(doc, "analystId"), "analystId"),
            assessed_at=as_str(require(doc, "assessedAt"), "assessedAt"),
            verdict=_enum_from(require(doc, "verdict"), Verdict, "verdict"),
            notes=doc.get("notes", "") if isinstance(doc.get("notes", ""), str) else "",
        )


# --- scope matching -------------------------------------------------------------

@dataclass(frozen=True)
class DimensionMatch:
    matched: bool
    missing: tuple

    def to_document(self) -> dict:
        return {"matched": self.matched, "missing": list(self.missing)}


@dataclass(frozen=True)
class ScopeMatchResult:
    dimensions: tuple  # ordered (name, DimensionMatch) pairs
    overall: bool

    def to_document(self) -> dict:
        return {
            "overall": "Matched" if self.overall else "NotMatched",
            "dimensions": {name: match.to_document() for name, match in self.dimensions},
        }


def match_scope(opinion: LegalOpinion, facts: RelationshipFacts) -> ScopeMatchResult:
    """Compare the fact pattern against the opinion scope, dimension by dimension.

    Mismatch is data, not an error; the caller decides what to do with it.
    """
    scope = opinion.scope
    dims = []

    agreement_ok = facts.agreement_type in scope.agreement_types
    dims.append(("agreementType", DimensionMatch(agreement_ok, () if agreement_ok else (facts.agreement_type,))))

    counterparty_ok = facts.counterparty_type in scope.counterparty_types
    dims.append(("counterpartyType", DimensionMatch(counterparty_ok, () if counterparty_ok else (facts.counterparty_type,))))

    if scope.transaction_types:
        missing_txn = tuple(sorted(facts.transaction_types - scope.transaction_types))
    else:
        missing_txn = ()  # empty scope set means universal coverage
    dims.append(("transactionTypes", DimensionMatch(not missing_txn, missing_txn)))

    law_ok = facts.agreement_governing_law == scope.governing_law
    dims.append(("governingLaw", DimensionMatch(law_ok, () if law_ok else (facts.agreement_governing_law,))))

    overall = all(match.matched for _, match in dims)
    return ScopeMatchResult(dimensions=tuple(dims), overall=overall)


# --- jurisdiction coverage --------------------------------------------------------

@dataclass(frozen=True)
class CoverageResult:
    covered: bool
    required: tuple
    uncovered: tuple
    covered_by: tuple  # ordered (jurisdiction, opinion ids) pairs

    def to_document(self) -> dict:
        return {
            "covered": self.covered,
            "required": list(self.required),
            "uncovered": list(self.uncovered),
            "coveredBy": {jurisdiction: list(ids) for jurisdiction, ids in self.covered_by},
        }


def check_jurisdiction_coverage(opinions, facts: RelationshipFacts) -> CoverageResult:
    """Require incorporation, branch, transaction and agreement law coverage.

    The required set must be contained in the union of the opinions' scope
    jurisdictions; the uncovered subset is returned otherwise.
    """
    opinions = list(opinions)
    if not opinions:
        raise SchemaInvalid("at least one opinion is required for a coverage check")
    required = sorted(facts.required_jurisdictions())
    covered_by = []
    uncovered = []
    for jurisdiction in required:
        ids = sorted(op.id for op in opinions if jurisdiction in op.scope.jurisdictions)
        if ids:
            covered_by.append((jurisdiction, tuple(ids)))
        else:
            uncovered.append(jurisdiction)
    return CoverageResult(
        covered=not uncovered,
        required=tuple(required),
        uncovered=tuple(uncovered),
        covered_by=tuple(covered_by),
    )


# --- item review updates ------------------------------------------------------------

def _replace_item(opinion: LegalOpinion, item_id: str, update) -> LegalOpinion:
    if opinion.find_item(item_id) is None:
        raise UnknownItem(item_id)
    assumptions = tuple(update(item) if item.id == item_id else item for item in opinion.assumptions)
    qualifications = tuple(update(item) if item.id == item_id else item for item in opinion.qualifications)
    return replace(opinion, assumptions=assumptions, qualifications=qualifications)


def set_verification(opinion: LegalOpinion, item_id: str, status: Verification, analyst_id: str, at: str) -> LegalOpinion:
    """New opinion value with the item's verification updated."""
    return _replace_item(
        opinion,
        item_id,
        lambda item: replace(item, verification=status, verified_by=analyst_id, verified_at=at),
    )


def set_annotation(opinion: LegalOpinion, item_id: str, annotation: Annotation) -> LegalOpinion:
    """New opinion value with the item's annotation updated."""
    return _replace_item(opinion, item_id, lambda item: replace(item, annotation=annotation))
