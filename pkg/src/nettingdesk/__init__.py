"""Close-out-netting workbench.

Structured legal-opinion conclusions in a controlled natural language,
exact basis-point probability ranges, policy-weighted netting
determinations with full audit traces, bilateral exposure arithmetic, and
the sector review-cost model — plus a versioned document store, a CLI and a
local HTTP service over one shared core.
"""

from .cnl import (
    BUILTIN_OBJECTS,
    BUILTIN_PREDICATES,
    Likelihood,
    ObjectTerm,
    Polarity,
    PredicateTerm,
    Sentence,
    VerbForm,
    VocabularyRegistry,
    builtin_registry,
    extend_registry,
    normalize,
    parse_sentence,
    render_sentence,
    sentence_from_document,
    sentence_text,
    sentence_to_document,
)
from .costs import CostReport, LevelParams, format_table, params_from_document, total_cost
from .documents import document_hash, dumps_document, loads_document
from .engine import (
    AGGREGATORS,
    BLOCKING_REASON_IDS,
    AdverseDirection,
    EmptyIntersectionPolicy,
    FactorAssessment,
    FactorStatus,
    MissingFactorPolicy,
    NettingDetermination,
    RiskFactor,
    RiskPolicy,
    aggregate_risk,
    determine,
    factor_range,
)
from .errors import NettingError, REASON_IDS
from .exposures import ExposureReport, Trade, compute_exposures, portfolio_from_document
from .opinions import (
    Annotation,
    HumanAssessment,
    LegalOpinion,
    OpinionScope,
    RelationshipFacts,
    ReviewItem,
    Verdict,
    Verification,
    check_jurisdiction_coverage,
    match_scope,
    set_annotation,
    set_verification,
)
from .ranges import (
    DEFAULT_MAPPING,
    EMPTY,
    FULL,
    SCALE_BP,
    LikelihoodMapping,
    ProbRange,
    complement,
    intersect,
    map_likelihood,
)
from .service import WorkbenchService, make_server
from .store import DocumentStore, EventKind, TriggerEvent

__version__ = "0.1.0"

__all__ = [
    "AGGREGATORS",
    "AdverseDirection",
    "Annotation",
    "BLOCKING_REASON_IDS",
    "BUILTIN_OBJECTS",
    "BUILTIN_PREDICATES",
    "CostReport",
    "DEFAULT_MAPPING",
    "DocumentStore",
    "EMPTY",
    "EmptyIntersectionPolicy",
    "EventKind",
    "ExposureReport",
    "FULL",
    "FactorAssessment",
    "FactorStatus",
    "HumanAssessment",
    "LegalOpinion",
    "LevelParams",
    "Likelihood",
    "LikelihoodMapping",
    "MissingFactorPolicy",
    "NettingDetermination",
    "NettingError",
    "ObjectTerm",
    "OpinionScope",
    "Polarity",
    "PredicateTerm",
    "ProbRange",
    "REASON_IDS",
    "RelationshipFacts",
    "ReviewItem",
    "RiskFactor",
    "RiskPolicy",
    "SCALE_BP",
    "Sentence",
    "Trade",
    "TriggerEvent",
    "Verdict",
    "Verification",
    "VerbForm",
    "VocabularyRegistry",
    "WorkbenchService",
    "aggregate_risk",
    "builtin_registry",
    "check_jurisdiction_coverage",
    "complement",
    "compute_exposures",
    "determine",
    "document_hash",
    "dumps_document",
    "extend_registry",
    "factor_range",
    "format_table",
    "intersect",
    "loads_document",
    "make_server",
    "map_likelihood",
    "match_scope",
    "normalize",
    "params_from_document",
    "parse_sentence",
    "portfolio_from_document",
    "render_sentence",
    "sentence_from_document",
    "sentence_text",
    "sentence_to_document",
    "set_annotation",
    "set_verification",
    "total_cost",
]
