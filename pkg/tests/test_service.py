"""Service routing, persistence semantics, and HTTP status mapping."""

from __future__ import annotations

import http.client
import json
import threading

import pytest

from nettingdesk.documents import document_bytes, dumps_document
from nettingdesk.errors import (
    NotFound,
    OpinionNotFound,
    PolicyInvalid,
    SchemaInvalid,
    SurfaceCollision,
    UnknownItem,
    UnknownSubject,
    VersionConflict,
)
from nettingdesk.service import WorkbenchService, make_server

from conftest import load_sample

SENTENCE = "It is possible that transactions will be cherry-picked"


@pytest.fixture
def service(store):
    return WorkbenchService(store)


def get(service, path, **query):
    status, doc = service.dispatch("GET", path, query, None)
    assert status == 200
    return doc


def post(service, path, body=None, **query):
    status, doc = service.dispatch("POST", path, query, body if body is not None else {})
    assert status == 200
    return doc


# --- plumbing routes -----------------------------------------------------------

def test_root_lists_endpoints(service):
    doc = get(service, "/")
    assert doc["service"] == "nettingdesk"
    assert "POST /whatif" in doc["endpoints"]


def test_health_and_reasons(service):
    assert get(service, "/health") == {"status": "ok"}
    reasons = get(service, "/reasons")
    assert "VersionConflict" in reasons["errorReasonIds"]
    assert "RiskAboveThreshold" in reasons["blockingReasonIds"]


def test_vocabulary_seeds_on_first_read(service):
    doc = get(service, "/vocabulary")
    assert doc["version"] == 1
    assert any(term["id"] == "transactions" for term in doc["objects"])
    assert service.store.latest_version("registries", "default") == 1


def test_vocabulary_carries_the_fixed_grammar_slots(service):
    doc = get(service, "/vocabulary")
    assert [term["id"] for term in doc["likelihoods"]] == [
        "unknown-whether",
        "definitely-not-the-case-that",
        "possible-that",
        "more-likely-than-not-that",
        "definitely-the-case-that",
    ]
    assert len(doc["verbs"]) == 6
    by_id = {term["id"]: term for term in doc["verbs"]}
    assert by_id["will-be"] == {"id": "will-be", "surface": "will be", "polarity": "Positive"}
    assert by_id["cannot-be"]["polarity"] == "Negated"
    # every slot a sentence needs is present, so clients hard-code nothing
    assert {"likelihoods", "objects", "verbs", "predicates"} <= doc.keys()


# --- parsing and vocabulary growth ------------------------------------------------

def test_parse_and_render_round_trip(service):
    parsed = post(service, "/parse", {"text": SENTENCE})
    assert parsed["likelihood"] == "possible-that"
    rendered = post(service, "/render", parsed)
    assert rendered == {"text": SENTENCE}


def test_vocabulary_extension_is_persisted_and_used(service):
    result = post(service, "/vocabulary/objects", {"id": "repo-transactions", "surface": "repo transactions"})
    assert result == {"registryVersion": 2, "storeVersion": 2}
    parsed = post(service, "/parse", {"text": "It is possible that repo transactions will be cherry-picked"})
    assert parsed["object"] == "repo-transactions"
    with pytest.raises(SurfaceCollision):
        post(service, "/vocabulary/predicates", {"id": "other", "surface": "repo transactions"})


# --- document kinds --------------------------------------------------------------

def test_opinion_crud_with_versions(service, opinion_doc):
    created = post(service, "/opinions", opinion_doc)
    assert created == {"id": "op-en-isda-2025", "version": 1}
    assert get(service, "/opinions") == {"ids": ["op-en-isda-2025"]}
    assert get(service, "/opinions/op-en-isda-2025") == opinion_doc

    with pytest.raises(VersionConflict):
        post(service, "/opinions", opinion_doc, baseVersion="0")
    updated = post(service, "/opinions", opinion_doc, baseVersion="1")
    assert updated["version"] == 2
    listing = get(service, "/opinions/op-en-isda-2025/versions")
    assert listing == {"id": "op-en-isda-2025", "versions": [1, 2], "latest": 2}
    assert get(service, "/opinions/op-en-isda-2025", version="1") == opinion_doc


def test_invalid_documents_never_reach_the_store(service, opinion_doc, policy_doc):
    with pytest.raises(SchemaInvalid):
        post(service, "/opinions", {**opinion_doc, "schemaVersion": 99})
    broken_policy = {**policy_doc, "thresholdBp": 10001}
    with pytest.raises(PolicyInvalid):
        post(service, "/policies", broken_policy)
    assert service.store.list_ids("opinions") == []
    assert service.store.list_ids("policies") == []


def test_assessments_need_an_explicit_id(service, assessment_doc):
    with pytest.raises(SchemaInvalid):
        post(service, "/assessments", assessment_doc)  # fixture has no id
    stored = post(service, "/assessments", {**assessment_doc, "id": "acme-2025-09"})
    assert stored == {"id": "acme-2025-09", "version": 1}
    assert get(service, "/assessments/acme-2025-09")["analystId"] == "analyst-7"


def test_bad_version_query_parameter(service, facts_doc):
    post(service, "/facts", facts_doc)
    with pytest.raises(SchemaInvalid):
        get(service, "/facts/acme-bank:isda-2002", version="latest")


# --- item review over the wire ------------------------------------------------------

def test_item_verification_and_annotation(service, opinion_doc):
    post(service, "/opinions", opinion_doc)
    result = post(
        service, "/opinions/op-en-isda-2025/items/a-no-amendment/verification",
        {"status": "Verified", "analystId": "analyst-7"},
    )
    assert result == {"id": "op-en-isda-2025", "version": 2}
    stored = get(service, "/opinions/op-en-isda-2025")
    item = next(i for i in stored["assumptions"] if i["id"] == "a-no-amendment")
    assert item["verification"] == "Verified"
    assert item["verifiedBy"] == "analyst-7"
    assert item["verifiedAt"] == "2025-09-01T12:00:00Z"  # frozen service clock

    result = post(
        service, "/opinions/op-en-isda-2025/items/q-foreign-collateral/annotation",
        {"annotation": "Negative"},
    )
    assert result["version"] == 3
    stored = get(service, "/opinions/op-en-isda-2025")
    item = next(i for i in stored["qualifications"] if i["id"] == "q-foreign-collateral")
    assert item["annotation"] == "Negative"


def test_item_update_guards(service, opinion_doc):
    post(service, "/opinions", opinion_doc)
    with pytest.raises(UnknownItem):
        post(service, "/opinions/op-en-isda-2025/items/no-such-item/annotation", {"annotation": "Neutral"})
    with pytest.raises(VersionConflict):
        post(
            service, "/opinions/op-en-isda-2025/items/a-capacity/verification",
            {"status": "Verified", "analystId": "a", "baseVersion": 7},
        )
    with pytest.raises(NotFound):
        post(service, "/opinions/ghost/items/a/verification", {"status": "Verified", "analystId": "a"})


# --- determinations and what-if -----------------------------------------------------

def inline_inputs(opinion_doc, facts_doc, policy_doc, assessment_doc, **extra):
    body = {
        "facts": facts_doc,
        "opinions": [opinion_doc],
        "policy": policy_doc,
        "assessment": assessment_doc,
        "asOfDate": "2025-09-01",
    }
    body.update(extra)
    return body


def test_determination_runs_and_persists(service, opinion_doc, facts_doc, policy_doc, assessment_doc):
    body = inline_inputs(opinion_doc, facts_doc, policy_doc, assessment_doc)
    result = post(service, "/determinations", body)
    assert result["relationshipId"] == "acme-bank:isda-2002"
    assert result["version"] == 1
    determination = result["determination"]
    assert determination["overallRisk"] == {"loBp": 50, "hiBp": 7450}
    assert get(service, "/determinations/acme-bank:isda-2002") == determination
    # rerun stacks a version
    assert post(service, "/determinations", body)["version"] == 2


def test_determination_resolves_stored_inputs_by_id(service, opinion_doc, facts_doc, policy_doc, assessment_doc):
    post(service, "/opinions", opinion_doc)
    post(service, "/facts", facts_doc)
    post(service, "/policies", policy_doc)
    post(service, "/assessments", {**assessment_doc, "id": "a-1"})
    result = post(
        service, "/determinations",
        {
            "factsId": "acme-bank:isda-2002",
            "opinionIds": ["op-en-isda-2025"],
            "policyId": "three-factor-default",
            "assessmentId": "a-1",
            "asOfDate": "2025-09-01",
        },
    )
    assert result["determination"]["opinionIds"] == ["op-en-isda-2025"]
    with pytest.raises(OpinionNotFound):
        post(
            service, "/determinations",
            {
                "factsId": "acme-bank:isda-2002",
                "opinionIds": ["op-missing"],
                "policyId": "three-factor-default",
                "assessmentId": "a-1",
                "asOfDate": "2025-09-01",
            },
        )


def test_whatif_matches_the_real_run_but_stores_nothing(service, opinion_doc, facts_doc, policy_doc, assessment_doc):
    body = inline_inputs(opinion_doc, facts_doc, policy_doc, assessment_doc)
    real = post(service, "/determinations", body)
    trial = post(service, "/whatif", body)
    assert dumps_document(trial) == dumps_document(real["determination"])
    assert service.store.latest_version("determinations", "acme-bank:isda-2002") == 1
    # the trial response is exactly the trace a persisted run would store
    assert document_bytes(trial) == service.store.load_bytes("determinations", "acme-bank:isda-2002")


def test_whatif_policy_overrides(service, opinion_doc, facts_doc, policy_doc, assessment_doc):
    body = inline_inputs(opinion_doc, facts_doc, policy_doc, assessment_doc, policyOverrides={"thresholdBp": 7500})
    trial = post(service, "/whatif", body)
    reason_ids = [r["reasonId"] for r in trial["blockingReasons"]]
    assert "RiskAboveThreshold" not in reason_ids
    assert trial["policy"]["thresholdBp"] == 7500
    assert not service.store.exists("determinations", "acme-bank:isda-2002")
    with pytest.raises(SchemaInvalid):
        post(service, "/whatif", inline_inputs(opinion_doc, facts_doc, policy_doc, assessment_doc, policyOverrides=[1]))


# --- events, sweeps, models ---------------------------------------------------------

def test_event_route_defaults_the_timestamp(service, opinion_doc, facts_doc, policy_doc, assessment_doc):
    post(service, "/determinations", inline_inputs(opinion_doc, facts_doc, policy_doc, assessment_doc))
    result = post(service, "/events", {"kind": "AgreementChanged", "subject": "acme-bank:isda-2002"})
    assert result["event"]["occurredAt"] == "2025-09-01T12:00:00Z"
    assert result["affected"] == ["acme-bank:isda-2002"]
    with pytest.raises(UnknownSubject):
        post(service, "/events", {"kind": "OpinionUpdated", "subject": "nobody"})


def test_sweep_route(service, opinion_doc, facts_doc, policy_doc, assessment_doc):
    post(service, "/determinations", inline_inputs(opinion_doc, facts_doc, policy_doc, assessment_doc))
    result = post(service, "/sweeps", {"asOfDate": "2027-01-01"})
    assert result["asOfDate"] == "2027-01-01"
    assert result["flipped"] == []  # determination was already No


def test_costmodel_route(service):
    params = {"levels": [{"level": 1, "banks": 2, "opinions": 10, "reviewedPct": 50,
                          "complexPct": 50, "costComplexDays": 2, "costSimpleDays": 1}]}
    doc = post(service, "/costmodel", {"params": params, "dayRate": 100})
    assert doc["reviewsTotal"] == 10
    assert doc["totalCost"] == "1500.00"
    assert doc["table"].splitlines()[-2] == "TOTAL 10 reviews, 15.00 days"
    # the params document can also be the whole body
    bare = post(service, "/costmodel", params)
    assert bare["reviewsTotal"] == 10


def test_exposures_route(service):
    doc = post(service, "/exposures", {"portfolio": load_sample("portfolio_bilateral.json")})
    assert doc["netValueToA"] == -10_000_000_000


# --- dispatch guard rails ------------------------------------------------------------

def test_unknown_routes_and_methods(service):
    with pytest.raises(NotFound):
        service.dispatch("GET", "/no/such/route", {}, None)
    with pytest.raises(NotFound):
        service.dispatch("POST", "/health", {}, {})
    with pytest.raises(NotFound):
        service.dispatch("PUT", "/health", {}, {})


def test_post_body_must_be_an_object(service):
    with pytest.raises(SchemaInvalid):
        service.dispatch("POST", "/parse", {}, [1, 2, 3])


# --- real HTTP round trips ------------------------------------------------------------

@pytest.fixture
def http_server(tmp_path, frozen_clock):
    ui_dir = tmp_path / "ui"
    ui_dir.mkdir()
    (ui_dir / "index.html").write_text("<!doctype html><h1>workbench</h1>", encoding="utf-8")
    (tmp_path / "outside.txt").write_text("top secret", encoding="utf-8")
    server = make_server(tmp_path / "store", 0, ui_dir=ui_dir, clock=frozen_clock)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield server
    finally:
        server.shutdown()
        server.server_close()
        thread.join(timeout=5)


def request(server, method, path, body=None):
    conn = http.client.HTTPConnection("127.0.0.1", server.server_address[1], timeout=10)
    try:
        payload = None if body is None else json.dumps(body).encode("utf-8")
        conn.request(method, path, body=payload)
        response = conn.getresponse()
        return response.status, response.getheader("Content-Type"), response.read()
    finally:
        conn.close()


def test_http_success_and_content_type(http_server):
    status, content_type, payload = request(http_server, "GET", "/health")
    assert status == 200
    assert content_type == "application/json; charset=utf-8"
    assert json.loads(payload) == {"status": "ok"}


def test_http_domain_errors_map_to_statuses(http_server, opinion_doc):
    status, _, payload = request(http_server, "POST", "/parse", {"text": "It is likely that x y z"})
    assert status == 400
    assert json.loads(payload)["error"]["reasonId"] == "UnknownLikelihood"

    status, _, payload = request(http_server, "GET", "/opinions/ghost")
    assert status == 404
    assert json.loads(payload)["error"]["reasonId"] == "NotFound"

    assert request(http_server, "POST", "/opinions", opinion_doc)[0] == 200
    status, _, payload = request(http_server, "POST", "/opinions", opinion_doc)
    assert status == 409
    assert json.loads(payload)["error"]["reasonId"] == "VersionConflict"


def test_http_percent_encoded_ids_resolve(http_server, facts_doc):
    assert request(http_server, "POST", "/facts", facts_doc)[0] == 200
    # colon ids must be reachable both raw and percent-encoded
    status, _, raw = request(http_server, "GET", "/facts/acme-bank:isda-2002")
    assert status == 200
    status, _, encoded = request(http_server, "GET", "/facts/acme-bank%3Aisda-2002")
    assert status == 200
    assert encoded == raw
    assert json.loads(encoded)["relationshipId"] == "acme-bank:isda-2002"


def test_http_unhandled_exception_is_a_500(http_server, monkeypatch):
    service = http_server.RequestHandlerClass.service

    def explode(*args, **kwargs):
        raise ValueError("boom")

    monkeypatch.setattr(service, "dispatch", explode)
    status, _, payload = request(http_server, "GET", "/health")
    assert status == 500
    assert json.loads(payload)["error"]["reasonId"] == "Internal"


def test_http_serves_the_ui(http_server):
    status, content_type, payload = request(http_server, "GET", "/ui/")
    assert status == 200
    assert content_type == "text/html; charset=utf-8"
    assert b"workbench" in payload
    assert request(http_server, "GET", "/ui")[0] == 200
    assert request(http_server, "GET", "/ui/index.html")[0] == 200


def test_http_ui_cannot_escape_its_root(http_server):
    status, _, payload = request(http_server, "GET", "/ui/../outside.txt")
    assert status == 404
    assert b"top secret" not in payload
    assert request(http_server, "GET", "/ui/missing.js")[0] == 404


def test_http_without_ui_dir(tmp_path):
    server = make_server(tmp_path / "bare-store", 0)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        assert request(server, "GET", "/ui/")[0] == 404
        assert request(server, "GET", "/health")[0] == 200
    finally:
        server.shutdown()
        server.server_close()
        thread.join(timeout=5)
