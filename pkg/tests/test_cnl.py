"""Grammar tests: parsing, rendering, normalization, registry evolution."""

from __future__ import annotations

import itertools

import pytest
from hypothesis import given, strategies as st

from nettingdesk.cnl import (
    BUILTIN_OBJECTS,
    BUILTIN_PREDICATES,
    Likelihood,
    ObjectTerm,
    Polarity,
    PredicateTerm,
    Sentence,
    VerbForm,
    builtin_registry,
    extend_registry,
    normalize,
    parse_sentence,
    render_sentence,
    sentence_from_document,
    sentence_to_document,
)
from nettingdesk.errors import (
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


def _all_sentences(registry=None):
    registry = registry or builtin_registry()
    for likelihood, obj, verb, predicate in itertools.product(
        Likelihood, registry.objects, VerbForm, registry.predicates
    ):
        yield Sentence(likelihood, obj, verb, predicate)


# --- the published example sentences -----------------------------------------

EXPECTED_EXAMPLES = [
    (
        "It is possible that transactions will be cherry-picked",
        ("possible-that", "transactions", "will-be", Polarity.POSITIVE, "cherry-picked"),
    ),
    (
        "It is more likely than not that transactions will not be cherry-picked",
        ("more-likely-than-not-that", "transactions", "will-not-be", Polarity.NEGATED, "cherry-picked"),
    ),
    (
        "It is more likely than not that collateral will not be enforceable",
        ("more-likely-than-not-that", "collateral", "will-not-be", Polarity.NEGATED, "enforceable"),
    ),
    (
        "It is unknown whether enforcement of close-out netting can be stayed",
        ("unknown-whether", "enforcement-of-close-out-netting", "can-be", Polarity.POSITIVE, "stayed"),
    ),
]


@pytest.mark.parametrize("text,expected", EXPECTED_EXAMPLES)
def test_example_sentences_parse_to_expected_structure(text, expected):
    sentence = parse_sentence(text)
    assert (
        sentence.likelihood.id,
        sentence.object.id,
        sentence.verb.id,
        sentence.verb.polarity,
        sentence.predicate.id,
    ) == expected
    # and the canonical rendering reproduces the input exactly
    assert render_sentence(sentence) == text


def test_all_270_builtin_combinations_round_trip():
    sentences = list(_all_sentences())
    assert len(sentences) == 270
    for sentence in sentences:
        assert parse_sentence(render_sentence(sentence)) == sentence


def test_parse_tolerates_case_whitespace_and_trailing_periods():
    messy = "  it IS   Possible   that TRANSACTIONS will be cherry-picked.. "
    sentence = parse_sentence(messy)
    assert sentence.likelihood is Likelihood.POSSIBLE_THAT
    assert normalize(messy) == normalize(render_sentence(sentence))


@given(st.text(max_size=80))
def test_normalize_is_idempotent(text):
    assert normalize(normalize(text)) == normalize(text)


# --- error reporting ----------------------------------------------------------

def test_unknown_likelihood_names_the_offending_span():
    with pytest.raises(UnknownLikelihood) as err:
        parse_sentence("It is likely that transactions will be cherry-picked")
    assert "likely that" in err.value.detail


def test_unknown_object_reported_at_the_object_slot():
    with pytest.raises(UnknownObject) as err:
        parse_sentence("It is possible that martians will be cherry-picked")
    assert err.value.detail.startswith("martians")


def test_unknown_verb_reported_after_a_valid_object():
    with pytest.raises(UnknownVerb) as err:
        parse_sentence("It is possible that transactions frobnicate cherry-picked")
    assert err.value.detail.startswith("frobnicate")


def test_unknown_predicate_reported_last():
    with pytest.raises(UnknownPredicate) as err:
        parse_sentence("It is possible that transactions will be purple")
    assert err.value.detail.startswith("purple")


def test_trailing_garbage_after_a_complete_sentence():
    with pytest.raises(TrailingGarbage) as err:
        parse_sentence("It is possible that transactions will be cherry-picked again")
    assert err.value.detail == "again"


@pytest.mark.parametrize("text", ["", "   ", "Maybe transactions settle", "it was possible that ..."])
def test_inputs_without_the_leader_are_rejected(text):
    with pytest.raises(NoLeadingItIs):
        parse_sentence(text)


def test_incomplete_sentence_reports_end_of_input():
    with pytest.raises(UnknownObject) as err:
        parse_sentence("It is possible that")
    assert err.value.detail == "<end of input>"


# --- registry extension --------------------------------------------------------

def test_extension_bumps_version_and_new_term_parses():
    registry = extend_registry(builtin_registry(), ObjectTerm("repo-transactions", "repo transactions"))
    assert registry.version == 2
    sentence = parse_sentence("It is possible that repo transactions will be cherry-picked", registry)
    assert sentence.object.id == "repo-transactions"


def test_extension_never_breaks_previously_valid_parses():
    registry = builtin_registry()
    before = {render_sentence(s, registry): s for s in _all_sentences(registry)}
    # A term that embeds an existing object surface plus a word that prefixes
    # a verb is the classic greedy-match trap; backtracking must absorb it.
    registry = extend_registry(registry, ObjectTerm("transactions-will", "transactions will"))
    registry = extend_registry(registry, PredicateTerm("novel-risk", "subject to novel netting risk"))
    for text, sentence in before.items():
        assert parse_sentence(text, registry) == sentence


def test_new_predicate_is_usable_alongside_builtins():
    registry = extend_registry(builtin_registry(), PredicateTerm("avoided", "avoided as a preference"))
    sentence = parse_sentence("It is unknown whether collateral can be avoided as a preference", registry)
    assert sentence.predicate.id == "avoided"
    assert parse_sentence(render_sentence(sentence, registry), registry) == sentence


@pytest.mark.parametrize(
    "surface",
    [
        "it is",
        "possible that",                # a likelihood phrase, verbatim
        "will be",                      # a verb phrase, verbatim
        "claims that will be netted",   # contains a verb phrase
        "unknown whether enforced",     # contains a likelihood phrase
    ],
)
def test_reserved_phrases_cannot_be_registered(surface):
    with pytest.raises(ReservedPhrase):
        extend_registry(builtin_registry(), ObjectTerm("x", surface))


def test_surface_and_id_collisions_are_rejected():
    registry = builtin_registry()
    with pytest.raises(SurfaceCollision):
        extend_registry(registry, ObjectTerm("txn2", "transactions"))
    with pytest.raises(SurfaceCollision):
        extend_registry(registry, PredicateTerm("transactions", "netted"))


def test_builtins_must_stay_present():
    from nettingdesk.cnl import VocabularyRegistry

    with pytest.raises(SchemaInvalid):
        VocabularyRegistry(version=1, objects=BUILTIN_OBJECTS[1:], predicates=BUILTIN_PREDICATES)


def test_registry_document_round_trip():
    from nettingdesk.cnl import VocabularyRegistry

    registry = extend_registry(builtin_registry(), ObjectTerm("gmra-trades", "repurchase trades"))
    doc = registry.to_document()
    assert VocabularyRegistry.from_document(doc) == registry


# --- rendering and sentence documents --------------------------------------------

def test_render_rejects_terms_missing_from_the_registry():
    foreign = Sentence(
        Likelihood.POSSIBLE_THAT,
        ObjectTerm("ghost", "ghost claims"),
        VerbForm.IS,
        BUILTIN_PREDICATES[0],
    )
    with pytest.raises(DanglingReference):
        render_sentence(foreign)


def test_sentence_document_round_trip_and_text_check():
    sentence = parse_sentence("It is definitely the case that collateral will be enforceable")
    doc = sentence_to_document(sentence)
    assert doc["polarity"] == "Positive"
    assert sentence_from_document(doc) == sentence

    tampered = dict(doc, text="It is possible that collateral will be enforceable")
    with pytest.raises(SchemaInvalid):
        sentence_from_document(tampered)


def test_ambiguity_is_impossible_by_construction():
    """Every built-in rendering parses back to exactly its own structure."""
    seen = {}
    for sentence in _all_sentences():
        text = render_sentence(sentence)
        assert text not in seen, f"two sentences render identically: {text}"
        seen[text] = sentence
