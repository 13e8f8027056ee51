"""Local JSON-over-HTTP service exposing every workbench operation.

Single core, two faces: everything here delegates to the same library code
the CLI uses, so no behavior exists only behind the service. Binds localhost
by default and has no authentication — it is a single-analyst desk tool, and
that gap is deliberate and documented.

Domain errors map onto status codes (unknown entity 404, optimistic-
concurrency loss 409, anything else domain-shaped 400) with the error's
machine-readable reason id in the body.
"""

from __future__ import annotations

import logging
import os
import urllib.parse
from datetime import date
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .cnl import (
    Likelihood,
    ObjectTerm,
    PredicateTerm,
    VerbForm,
    VocabularyRegistry,
    extend_registry,
    parse_sentence,
    render_sentence,
    sentence_from_document,
    sentence_to_document,
)
from .costs import format_table, params_from_document, total_cost
from .documents import as_date, as_int, as_list, as_str, as_str_list, document_bytes, iso_utc, loads_document, require
from .engine import BLOCKING_REASON_IDS, RiskPolicy, determine
from .errors import (
    NettingError,
    NotFound,
    OpinionNotFound,
    REASON_IDS,
    SchemaInvalid,
    UnknownItem,
    UnknownSubject,
    VersionConflict,
)
from .exposures import compute_exposures, portfolio_from_document
from .opinions import Annotation, HumanAssessment, LegalOpinion, RelationshipFacts, Verification, set_annotation, set_verification
from .store import DocumentStore, TriggerEvent

log = logging.getLogger("nettingdesk.service")

_NOT_FOUND_ERRORS = (NotFound, UnknownItem, UnknownSubject, OpinionNotFound)

_ENDPOINTS = (
    "GET /health",
    "GET /reasons",
    "GET /vocabulary",
    "POST /vocabulary/objects",
    "POST /vocabulary/predicates",
    "POST /parse",
    "POST /render",
    "GET|POST /opinions",
    "GET /opinions/{id}[?version=N]",
    "GET /opinions/{id}/versions",
    "POST /opinions/{id}/items/{itemId}/verification",
    "POST /opinions/{id}/items/{itemId}/annotation",
    "GET|POST /policies",
    "GET /policies/{id}",
    "GET|POST /facts",
    "GET /facts/{id}",
    "GET|POST /assessments",
    "GET /assessments/{id}",
    "GET|POST /determinations",
    "GET /determinations/{id}[?version=N]",
    "POST /whatif",
    "POST /events",
    "POST /sweeps",
    "POST /costmodel",
    "POST /exposures",
    "GET /audit",
    "GET /audit/verify",
)

#: Kinds that expose plain save/load documents over the wire.
_DOCUMENT_KINDS = {
    "opinions": "opinions",
    "policies": "policies",
    "facts": "facts",
    "assessments": "assessments",
    "determinations": "determinations",
}


def _status_for(error: NettingError) -> int:
    if isinstance(error, _NOT_FOUND_ERRORS):
        return 404
    if isinstance(error, VersionConflict):
        return 409
    return 400


class WorkbenchService:
    """Route handling over one document store; transport-free and testable."""

    def __init__(self, store: DocumentStore, ui_dir=None):
        self.store = store
        self.ui_dir = None if ui_dir is None else os.path.abspath(os.fspath(ui_dir))

    # -- helpers ----------------------------------------------------------

    def registry(self) -> VocabularyRegistry:
        return VocabularyRegistry.from_document(self.store.ensure_registry())

    def _load_entity(self, kind: str, entity_id: str, query: dict) -> dict:
        version = query.get("version")
        return self.store.load(kind, entity_id, None if version is None else _query_int(version, "version"))

    def _base_version(self, kind: str, entity_id: str, query: dict):
        """Base version for a determination write: ?baseVersion=N, else what exists.

        Determinations are system-produced, so re-running one stacks a new
        version without the client tracking version numbers. Analyst-authored
        documents never get this treatment — their updates must name the
        version they were built on.
        """
        if "baseVersion" in query:
            return _query_int(query["baseVersion"], "baseVersion")
        return self.store.latest_version(kind, entity_id) if self.store.exists(kind, entity_id) else None

    def _validate_for_kind(self, kind: str, doc: dict) -> str:
        """Check the document parses as its kind; return the entity id."""
        registry = self.registry()
        if kind == "opinions":
            return LegalOpinion.from_document(doc, registry).id
        if kind == "policies":
            return RiskPolicy.from_document(doc).id
        if kind == "facts":
            return RelationshipFacts.from_document(doc).relationship_id
        if kind == "assessments":
            body = dict(doc)
            entity_id = as_str(require(body, "id"), "id")
            body.pop("id")
            HumanAssessment.from_document(body)
            return entity_id
        raise SchemaInvalid(f"documents of kind {kind!r} cannot be posted directly")

    def _determination_inputs(self, body: dict):
        registry = self.registry()
        facts_doc = body["facts"] if "facts" in body else self.store.load("facts", as_str(require(body, "factsId"), "factsId"))
        facts = RelationshipFacts.from_document(facts_doc)

        opinions = []
        if "opinions" in body:
            for doc in as_list(body["opinions"], "opinions"):
                opinions.append(LegalOpinion.from_document(doc, registry))
        else:
            for opinion_id in as_str_list(require(body, "opinionIds"), "opinionIds"):
                if not self.store.exists("opinions", opinion_id):
                    raise OpinionNotFound(opinion_id)
                opinions.append(LegalOpinion.from_document(self.store.load("opinions", opinion_id), registry))

        policy_doc = body["policy"] if "policy" in body else self.store.load("policies", as_str(require(body, "policyId"), "policyId"))
        overrides = body.get("policyOverrides")
        if overrides is not None:
            if not isinstance(overrides, dict):
                raise SchemaInvalid("policyOverrides must be an object")
            policy_doc = {**policy_doc, **overrides}
        policy = RiskPolicy.from_document(policy_doc)

        if "assessment" in body:
            assessment = HumanAssessment.from_document(body["assessment"])
        else:
            doc = dict(self.store.load("assessments", as_str(require(body, "assessmentId"), "assessmentId")))
            doc.pop("id", None)
            assessment = HumanAssessment.from_document(doc)

        as_of = as_date(require(body, "asOfDate"), "asOfDate")
        return facts, opinions, policy, assessment, as_of

    # -- dispatch ----------------------------------------------------------

    def dispatch(self, method: str, path: str, query: dict, body):
        # split before unquoting so %2F inside an entity id never becomes a separator
        parts = [urllib.parse.unquote(p) for p in path.split("/") if p]

        if method == "GET":
            return self._dispatch_get(parts, query)
        if method == "POST":
            return self._dispatch_post(parts, query, body if body is not None else {})
        raise NotFound(f"no route {method} {path}")

    def _dispatch_get(self, parts, query):
        if not parts:
            return 200, {"service": "nettingdesk", "endpoints": list(_ENDPOINTS)}
        head = parts[0]
        if parts == ["health"]:
            return 200, {"status": "ok"}
        if parts == ["reasons"]:
            return 200, {"errorReasonIds": list(REASON_IDS), "blockingReasonIds": list(BLOCKING_REASON_IDS)}
        if parts == ["vocabulary"]:
            self.store.ensure_registry()
            doc = dict(self._load_entity("registries", "default", query))
            # the grammar's fixed slots ride along so clients need no hard-coded lists
            doc["likelihoods"] = [{"id": term.id, "surface": term.surface} for term in Likelihood]
            doc["verbs"] = [
                {"id": term.id, "surface": term.surface, "polarity": term.polarity.value}
                for term in VerbForm
            ]
            return 200, doc
        if parts == ["audit"]:
            return 200, {"entries": self.store.audit_entries()}
        if parts == ["audit", "verify"]:
            return 200, self.store.verify_audit()
        if head in _DOCUMENT_KINDS:
            kind = _DOCUMENT_KINDS[head]
            if len(parts) == 1:
                return 200, {"ids": self.store.list_ids(kind)}
            if len(parts) == 2:
                return 200, self._load_entity(kind, parts[1], query)
            if len(parts) == 3 and parts[2] == "versions":
                return 200, {
                    "id": parts[1],
                    "versions": self.store.versions(kind, parts[1]),
                    "latest": self.store.latest_version(kind, parts[1]),
                }
        raise NotFound(f"no route GET /{'/'.join(parts)}")

    def _dispatch_post(self, parts, query, body):
        if not isinstance(body, dict):
            raise SchemaInvalid("request body must be a JSON object")
        if parts == ["parse"]:
            registry = self.registry()
            sentence = parse_sentence(as_str(require(body, "text"), "text"), registry)
            return 200, sentence_to_document(sentence, registry)
        if parts == ["render"]:
            registry = self.registry()
            sentence = sentence_from_document(body, registry)
            return 200, {"text": render_sentence(sentence, registry)}
        if parts[:1] == ["vocabulary"] and len(parts) == 2 and parts[1] in ("objects", "predicates"):
            term_cls = ObjectTerm if parts[1] == "objects" else PredicateTerm
            term = term_cls(as_str(require(body, "id"), "id"), as_str(require(body, "surface"), "surface"))
            current = self.store.ensure_registry()
            extended = extend_registry(VocabularyRegistry.from_document(current), term)
            version = self.store.save(
                "registries", "default", extended.to_document(),
                base_version=self.store.latest_version("registries", "default"),
                actor=query.get("actor", "service"), action=f"extend-{parts[1]}",
            )
            return 200, {"registryVersion": extended.version, "storeVersion": version}
        if len(parts) == 1 and parts[0] in _DOCUMENT_KINDS and parts[0] != "determinations":
            kind = _DOCUMENT_KINDS[parts[0]]
            entity_id = self._validate_for_kind(kind, body)
            # create unless the caller names the version it built on
            base = _query_int(query["baseVersion"], "baseVersion") if "baseVersion" in query else None
            version = self.store.save(
                kind, entity_id, body,
                base_version=base,
                actor=query.get("actor", "service"),
            )
            return 200, {"id": entity_id, "version": version}
        if len(parts) == 5 and parts[0] == "opinions" and parts[2] == "items" and parts[4] in ("verification", "annotation"):
            return self._update_item(parts[1], parts[3], parts[4], query, body)
        if parts == ["determinations"]:
            facts, opinions, policy, assessment, as_of = self._determination_inputs(body)
            determination = determine(facts, opinions, policy, assessment, as_of)
            doc = determination.to_document()
            version = self.store.save(
                "determinations", determination.relationship_id, doc,
                base_version=self._base_version("determinations", determination.relationship_id, query),
                actor=query.get("actor", "service"), action="determine",
            )
            return 200, {"relationshipId": determination.relationship_id, "version": version, "determination": doc}
        if parts == ["whatif"]:
            facts, opinions, policy, assessment, as_of = self._determination_inputs(body)
            determination = determine(facts, opinions, policy, assessment, as_of)
            # the bare trace, so the response body is byte-identical to what a
            # persisted run stores and the CLI prints for the same inputs
            return 200, determination.to_document()
        if parts == ["events"]:
            event_doc = dict(body)
            event_doc.setdefault("occurredAt", iso_utc(self.store.now()))
            event = TriggerEvent.from_document(event_doc)
            affected = self.store.record_event(event, actor=query.get("actor", "service"))
            return 200, {"event": event.to_document(), "affected": affected}
        if parts == ["sweeps"]:
            as_of = as_date(require(body, "asOfDate"), "asOfDate")
            days = as_int(body.get("defaultValidityDays", 365), "defaultValidityDays")
            return 200, self.store.sweep_expiry(as_of, days, actor=query.get("actor", "service"))
        if parts == ["costmodel"]:
            params_doc = body.get("params", body)
            report = total_cost(params_from_document(params_doc), body.get("dayRate"))
            doc = report.to_document()
            doc["table"] = format_table(report)
            return 200, doc
        if parts == ["exposures"]:
            portfolio = portfolio_from_document(require(body, "portfolio"))
            return 200, compute_exposures(portfolio).to_document()
        raise NotFound(f"no route POST /{'/'.join(parts)}")

    def _update_item(self, opinion_id: str, item_id: str, action: str, query: dict, body: dict):
        if not self.store.exists("opinions", opinion_id):
            raise NotFound(f"opinions/{opinion_id}")
        version = self.store.latest_version("opinions", opinion_id)
        if "baseVersion" in body and as_int(body["baseVersion"], "baseVersion") != version:
            raise VersionConflict(f"opinions/{opinion_id}: base {body['baseVersion']}, current {version}")
        registry = self.registry()
        opinion = LegalOpinion.from_document(self.store.load("opinions", opinion_id, version), registry)
        if action == "verification":
            status = _enum_by_value(Verification, as_str(require(body, "status"), "status"), "status")
            analyst = as_str(require(body, "analystId"), "analystId")
            at = body.get("at") or iso_utc(self.store.now())
            updated = set_verification(opinion, item_id, status, analyst, as_str(at, "at"))
        else:
            annotation = _enum_by_value(Annotation, as_str(require(body, "annotation"), "annotation"), "annotation")
            updated = set_annotation(opinion, item_id, annotation)
        new_version = self.store.save(
            "opinions", opinion_id, updated.to_document(registry),
            base_version=version, actor=query.get("actor", "service"), action=f"item-{action}",
        )
        return 200, {"id": opinion_id, "version": new_version}


def _enum_by_value(enum_cls, value: str, field: str):
    for member in enum_cls:
        if member.value == value:
            return member
    raise SchemaInvalid(f"{field!r} must be one of {[m.value for m in enum_cls]}, got {value!r}")


def _query_int(value: str, field: str) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise SchemaInvalid(f"query parameter {field!r} must be an integer, got {value!r}") from None


_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json; charset=utf-8",
    ".svg": "image/svg+xml",
    ".png": "image/png",
    ".ico": "image/x-icon",
}


class _Handler(BaseHTTPRequestHandler):
    service: WorkbenchService = None  # bound by make_server

    def log_message(self, fmt, *args):  # route access logs through logging
        log.debug("%s - %s", self.address_string(), fmt % args)

    def do_GET(self):
        self._handle("GET")

    def do_POST(self):
        self._handle("POST")

    def _handle(self, method: str) -> None:
        split = urllib.parse.urlsplit(self.path)
        if method == "GET" and (split.path == "/ui" or split.path.startswith("/ui/")):
            self._serve_static(split.path)
            return
        try:
            body = self._read_body() if method == "POST" else None
            query = {key: values[-1] for key, values in urllib.parse.parse_qs(split.query).items()}
            status, doc = self.service.dispatch(method, split.path, query, body)
        except NettingError as exc:
            status, doc = _status_for(exc), exc.to_document()
        except Exception:  # noqa: BLE001 - boundary: report, don't die
            log.exception("unhandled error on %s %s", method, self.path)
            status, doc = 500, {"error": {"detail": "internal error", "reasonId": "Internal"}}
        payload = document_bytes(doc)
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def _read_body(self):
        length = int(self.headers.get("Content-Length") or 0)
        if length == 0:
            return {}
        raw = self.rfile.read(length)
        return loads_document(raw.decode("utf-8"))

    def _serve_static(self, path: str) -> None:
        root = self.service.ui_dir
        relative = path[len("/ui"):].lstrip("/") or "index.html"
        full = None if root is None else os.path.normpath(os.path.join(root, relative))
        inside = full is not None and (full == root or full.startswith(root + os.sep))
        if not inside or not os.path.isfile(full):
            payload = document_bytes({"error": {"detail": f"no UI file {relative}", "reasonId": "NotFound"}})
            self.send_response(404)
            self.send_header("Content-Type", "application/json; charset=utf-8")
            self.send_header("Content-Length", str(len(payload)))
            self.end_headers()
            self.wfile.write(payload)
            return
        with open(full, "rb") as handle:
            payload = handle.read()
        self.send_response(200)
        self.send_header("Content-Type", _CONTENT_TYPES.get(os.path.splitext(full)[1], "application/octet-stream"))
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)


def make_server(store_dir, port: int, host: str = "127.0.0.1", ui_dir=None, clock=None) -> ThreadingHTTPServer:
    """Build (but do not start) the HTTP server bound to a store directory."""
    store = DocumentStore(store_dir) if clock is None else DocumentStore(store_dir, clock=clock)
    service = WorkbenchService(store, ui_dir=ui_dir)
    handler = type("BoundHandler", (_Handler,), {"service": service})
    return ThreadingHTTPServer((host, port), handler)
