"""Controlled language for opinion conclusions.

Every conclusion sentence follows the fixed template::

    It is <likelihood> <object> <verb> <predicate>

The likelihood and verb vocabularies are closed (the numeric risk mapping is
keyed on the five likelihoods); objects and predicates live in a versioned
registry that institutions may extend. Parsing is deterministic: slots are
matched longest-phrase-first with ordered backtracking, so any input yields
exactly one sentence or exactly one error naming the offending span.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .documents import as_int, as_list, as_str, require
from .errors import (
    DanglingReference,
    NoLeadingItIs,
    ReservedPhrase,
    SchemaInvalid,
    SurfaceCollision,
    TrailingGarbage,
    UnknownLikelihood,
    UnknownObject,
    UnknownPredicate,
    UnknownVerb,
)

_LEADER = "it is"


def normalize(text: str) -> str:
    """Case-fold, collapse internal whitespace, trim, drop trailing periods."""
    collapsed = re.sub(r"\s+", " ", text.strip()).casefold()
    return collapsed.rstrip(" .")


class Likelihood(Enum):
    """The five graded certainty levels a conclusion sentence may carry."""

    UNKNOWN_WHETHER = ("unknown-whether", "unknown whether")
    DEFINITELY_NOT_THE_CASE_THAT = ("definitely-not-the-case-that", "definitely not the case that")
    POSSIBLE_THAT = ("possible-that", "possible that")
    MORE_LIKELY_THAN_NOT_THAT = ("more-likely-than-not-that", "more likely than not that")
    DEFINITELY_THE_CASE_THAT = ("definitely-the-case-that", "definitely the case that")

    def __init__(self, ident: str, surface: str) -> None:
        self.id = ident
        self.surface = surface

    @classmethod
    def from_id(cls, ident: str) -> "Likelihood":
        member = _LIKELIHOOD_BY_ID.get(ident)
        if member is None:
            raise SchemaInvalid(f"unknown likelihood id {ident!r}")
        return member


_LIKELIHOOD_BY_ID = {m.id: m for m in Likelihood}


class Polarity(Enum):
    POSITIVE = "Positive"
    NEGATED = "Negated"


class VerbForm(Enum):
    """Closed verb set; polarity is a total function of the form."""

    IS = ("is", "is", Polarity.POSITIVE)
    IS_NOT = ("is-not", "is not", Polarity.NEGATED)
    WILL_BE = ("will-be", "will be", Polarity.POSITIVE)
    WILL_NOT_BE = ("will-not-be", "will not be", Polarity.NEGATED)
    CAN_BE = ("can-be", "can be", Polarity.POSITIVE)
    CANNOT_BE = ("cannot-be", "cannot be", Polarity.NEGATED)

    def __init__(self, ident: str, surface: str, polarity: Polarity) -> None:
        self.id = ident
        self.surface = surface
        self.polarity = polarity

    @classmethod
    def from_id(cls, ident: str) -> "VerbForm":
        member = _VERB_BY_ID.get(ident)
        if member is None:
            raise SchemaInvalid(f"unknown verb id {ident!r}")
        return member


_VERB_BY_ID = {m.id: m for m in VerbForm}


@dataclass(frozen=True)
class ObjectTerm:
    id: str
    surface: str


@dataclass(frozen=True)
class PredicateTerm:
    id: str
    surface: str


BUILTIN_OBJECTS = (
    ObjectTerm("transactions", "transactions"),
    ObjectTerm("collateral", "collateral"),
    ObjectTerm("enforcement-of-close-out-netting", "enforcement of close-out netting"),
)

BUILTIN_PREDICATES = (
    PredicateTerm("cherry-picked", "cherry-picked"),
    PredicateTerm("enforceable", "enforceable"),
    PredicateTerm("stayed", "stayed"),
)

#: Phrases no registered term may equal, and whose verb members no term may
#: contain: they anchor the slot boundaries during parsing.
_RESERVED_EXACT = frozenset(
    {_LEADER}
    | {m.surface for m in Likelihood}
    | {m.surface for m in VerbForm}
)


@dataclass(frozen=True)
class Sentence:
    """One parsed conclusion statement: likelihood, object, verb, predicate."""

    likelihood: Likelihood
    object: ObjectTerm
    verb: VerbForm
    predicate: PredicateTerm


@dataclass(frozen=True)
class VocabularyRegistry:
    """Versioned object/predicate vocabulary; built-ins are always present."""

    version: int
    objects: tuple
    predicates: tuple

    def __post_init__(self) -> None:
        if self.version < 1:
            raise SchemaInvalid("registry version must be >= 1")
        for builtin in BUILTIN_OBJECTS:
            if builtin not in self.objects:
                raise SchemaInvalid(f"built-in object {builtin.id!r} missing from registry")
        for builtin in BUILTIN_PREDICATES:
            if builtin not in self.predicates:
                raise SchemaInvalid(f"built-in predicate {builtin.id!r} missing from registry")
        surfaces = [t.surface for t in self.objects] + [t.surface for t in self.predicates]
        if len(set(surfaces)) != len(surfaces):
            raise SchemaInvalid("registry surfaces must be unique")
        ids = [t.id for t in self.objects] + [t.id for t in self.predicates]
        if len(set(ids)) != len(ids):
            raise SchemaInvalid("registry term ids must be unique")

    def object_by_id(self, ident: str):
        for term in self.objects:
            if term.id == ident:
                return term
        return None

    def predicate_by_id(self, ident: str):
        for term in self.predicates:
            if term.id == ident:
                return term
        return None

    def to_document(self) -> dict:
        return {
            "version": self.version,
            "objects": [{"id": t.id, "surface": t.surface} for t in self.objects],
            "predicates": [{"id": t.id, "surface": t.surface} for t in self.predicates],
        }

    @classmethod
    def from_document(cls, doc: dict) -> "VocabularyRegistry":
        version = as_int(require(doc, "version"), "version")
        objects = tuple(
            ObjectTerm(as_str(require(entry, "id"), "objects.id"), as_str(require(entry, "surface"), "objects.surface"))
            for entry in as_list(require(doc, "objects"), "objects")
        )
        predicates = tuple(
            PredicateTerm(as_str(require(entry, "id"), "predicates.id"), as_str(require(entry, "surface"), "predicates.surface"))
            for entry in as_list(require(doc, "predicates"), "predicates")
        )
        return cls(version=version, objects=objects, predicates=predicates)


def builtin_registry() -> VocabularyRegistry:
    return VocabularyRegistry(version=1, objects=BUILTIN_OBJECTS, predicates=BUILTIN_PREDICATES)


def _contains_phrase(surface: str, phrase: str) -> bool:
    return f" {surface} ".find(f" {phrase} ") >= 0


def extend_registry(registry: VocabularyRegistry, term) -> VocabularyRegistry:
    """Return a new registry (version + 1) with ``term`` added.

    The new surface may not equal any existing surface or any closed-slot
    phrase, and may not contain a verb phrase: verbs anchor the boundary
    between the object and predicate slots, so a term embedding one would
    change how previously valid sentences parse.
    """
    if not isinstance(term, (ObjectTerm, PredicateTerm)):
        raise SchemaInvalid("term must be an ObjectTerm or PredicateTerm")
    surface = normalize(term.surface)
    if not surface:
        raise SchemaInvalid("term surface must be non-empty")
    if surface in _RESERVED_EXACT:
        raise ReservedPhrase(surface)
    for verb in VerbForm:
        if _contains_phrase(surface, verb.surface):
            raise ReservedPhrase(f"{surface!r} contains verb phrase {verb.surface!r}")
    for likelihood in Likelihood:
        if _contains_phrase(surface, likelihood.surface):
            raise ReservedPhrase(f"{surface!r} contains likelihood phrase {likelihood.surface!r}")
    existing = {t.surface for t in registry.objects} | {t.surface for t in registry.predicates}
    if surface in existing:
        raise SurfaceCollision(surface)
    existing_ids = {t.id for t in registry.objects} | {t.id for t in registry.predicates}
    if term.id in existing_ids:
        raise SurfaceCollision(f"id {term.id!r} already registered")

    if isinstance(term, ObjectTerm):
        objects = registry.objects + (ObjectTerm(term.id, surface),)
        predicates = registry.predicates
    else:
        objects = registry.objects
        predicates = registry.predicates + (PredicateTerm(term.id, surface),)
    return VocabularyRegistry(version=registry.version + 1, objects=objects, predicates=predicates)


# --- parsing ------------------------------------------------------------------

def _longest_first(pairs):
    return sorted(pairs, key=lambda pair: (-len(pair[0]), pair[0]))


def _matches(rest: str, phrases):
    """Yield (item, remainder) for whole-phrase prefixes of ``rest``, longest first."""
    for surface, item in phrases:
        if rest == surface:
            yield item, ""
        elif rest.startswith(surface + " "):
            yield item, rest[len(surface) + 1:]


_SLOT_ERRORS = (UnknownLikelihood, UnknownObject, UnknownVerb, UnknownPredicate)


def parse_sentence(text: str, registry: VocabularyRegistry | None = None) -> Sentence:
    """Parse one conclusion sentence against the registry vocabulary.

    Raises the error class for the first slot that cannot be matched on the
    deepest parse attempt, with the unmatched span in ``detail``.
    """
    if registry is None:
        registry = builtin_registry()
    if not text or not text.strip():
        raise NoLeadingItIs("empty input")
    norm = normalize(text)
    if norm != _LEADER and not norm.startswith(_LEADER + " "):
        raise NoLeadingItIs(norm[: len(_LEADER) + 10])
    rest = "" if norm == _LEADER else norm[len(_LEADER) + 1:]

    slots = (
        _longest_first([(m.surface, m) for m in Likelihood]),
        _longest_first([(t.surface, t) for t in registry.objects]),
        _longest_first([(m.surface, m) for m in VerbForm]),
        _longest_first([(t.surface, t) for t in registry.predicates]),
    )

    # Deepest failure wins error reporting: higher slot index first, then the
    # attempt that consumed the most input.
    deepest = [0, rest]

    def note_failure(slot: int, remaining: str) -> None:
        if slot > deepest[0] or (slot == deepest[0] and len(remaining) < len(deepest[1])):
            deepest[0] = slot
            deepest[1] = remaining

    def attempt(slot: int, remaining: str, picked: tuple):
        if slot == 4:
            if remaining == "":
                return picked
            note_failure(4, remaining)
            return None
        advanced = False
        for item, after in _matches(remaining, slots[slot]):
            advanced = True
            found = attempt(slot + 1, after, picked + (item,))
            if found is not None:
                return found
        if not advanced:
            note_failure(slot, remaining)
        return None

    picked = attempt(0, rest, ())
    if picked is not None:
        return Sentence(likelihood=picked[0], object=picked[1], verb=picked[2], predicate=picked[3])
    slot, span = deepest
    if slot == 4:
        raise TrailingGarbage(span)
    raise _SLOT_ERRORS[slot](span or "<end of input>")


def sentence_text(sentence: Sentence) -> str:
    """Format from the terms the sentence already carries; no registry check."""
    return " ".join(
        ("It is", sentence.likelihood.surface, sentence.object.surface, sentence.verb.surface, sentence.predicate.surface)
    )


def render_sentence(sentence: Sentence, registry: VocabularyRegistry | None = None) -> str:
    """Canonical text: capitalized leader, lowercase phrases, no final period."""
    if registry is None:
        registry = builtin_registry()
    if registry.object_by_id(sentence.object.id) != sentence.object:
        raise DanglingReference(f"object {sentence.object.id!r} not in registry")
    if registry.predicate_by_id(sentence.predicate.id) != sentence.predicate:
        raise DanglingReference(f"predicate {sentence.predicate.id!r} not in registry")
    return sentence_text(sentence)


# --- sentence documents ---------------------------------------------------------

def sentence_to_document(sentence: Sentence, registry: VocabularyRegistry | None = None) -> dict:
    return {
        "likelihood": sentence.likelihood.id,
        "object": sentence.object.id,
        "verb": sentence.verb.id,
        "polarity": sentence.verb.polarity.value,
        "predicate": sentence.predicate.id,
        "text": render_sentence(sentence, registry),
    }


def sentence_from_document(doc: dict, registry: VocabularyRegistry | None = None) -> Sentence:
    if registry is None:
        registry = builtin_registry()
    likelihood = Likelihood.from_id(as_str(require(doc, "likelihood"), "likelihood"))
    verb = VerbForm.from_id(as_str(require(doc, "verb"), "verb"))
    object_id = as_str(require(doc, "object"), "object")
    predicate_id = as_str(require(doc, "predicate"), "predicate")
    obj = registry.object_by_id(object_id)
    if obj is None:
        raise DanglingReference(f"object {object_id!r} not in registry")
    predicate = registry.predicate_by_id(predicate_id)
    if predicate is None:
        raise DanglingReference(f"predicate {predicate_id!r} not in registry")
    sentence = Sentence(likelihood=likelihood, object=obj, verb=verb, predicate=predicate)
    text = doc.get("text")
    if text is not None and normalize(text) != normalize(render_sentence(sentence, registry)):
        raise SchemaInvalid(f"stored text {text!r} does not match the structured sentence")
    return sentence
