"""Command-line entry points.

Every subcommand prints the same canonical documents the service serves, so
scripted output can be diffed byte-for-byte against service responses. Exit
codes: 0 success, 1 domain error (error document on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from datetime import date

from .cnl import VocabularyRegistry, builtin_registry, parse_sentence, render_sentence, sentence_from_document, sentence_to_document
from .costs import format_table, params_from_document, total_cost
from .documents import as_date, dumps_document, loads_document
from .engine import RiskPolicy, determine
from .errors import NettingError, NotFound
from .exposures import compute_exposures, portfolio_from_document
from .opinions import HumanAssessment, LegalOpinion, RelationshipFacts
from .service import make_server
from .store import DocumentStore, TriggerEvent


def _read_doc(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return loads_document(handle.read())
    except FileNotFoundError:
        raise NotFound(f"file {path}") from None


def _registry_for(args) -> VocabularyRegistry:
    store_dir = getattr(args, "store", None)
    if store_dir:
        return VocabularyRegistry.from_document(DocumentStore(store_dir).ensure_registry())
    return builtin_registry()


def _emit(doc) -> int:
    sys.stdout.write(dumps_document(doc))
    return 0


def _cmd_parse(args) -> int:
    registry = _registry_for(args)
    return _emit(sentence_to_document(parse_sentence(args.sentence, registry), registry))


def _cmd_render(args) -> int:
    registry = _registry_for(args)
    sentence = sentence_from_document(_read_doc(args.file), registry)
    print(render_sentence(sentence, registry))
    return 0


def _cmd_determine(args) -> int:
    registry = _registry_for(args)
    facts = RelationshipFacts.from_document(_read_doc(args.facts))
    opinions = [LegalOpinion.from_document(_read_doc(path), registry) for path in args.opinion]
    policy = RiskPolicy.from_document(_read_doc(args.policy))
    assessment_doc = dict(_read_doc(args.assessment))
    assessment_doc.pop("id", None)
    assessment = HumanAssessment.from_document(assessment_doc)
    result = determine(facts, opinions, policy, assessment, as_date(args.as_of, "--as-of"))
    doc = result.to_document()
    if getattr(args, "store", None):
        store = DocumentStore(args.store)
        base = store.latest_version("determinations", result.relationship_id) if store.exists("determinations", result.relationship_id) else None
        store.save("determinations", result.relationship_id, doc, base_version=base, actor="cli", action="determine")
    return _emit(doc)


def _cmd_exposures(args) -> int:
    return _emit(compute_exposures(portfolio_from_document(_read_doc(args.portfolio))).to_document())


def _cmd_costmodel(args) -> int:
    report = total_cost(params_from_document(_read_doc(args.params)), args.day_rate)
    if args.json:
        return _emit(report.to_document())
    print(format_table(report))
    return 0


def _cmd_sweep(args) -> int:
    store = DocumentStore(args.store)
    return _emit(store.sweep_expiry(as_date(args.as_of, "--as-of"), args.validity_days, actor="cli"))


def _cmd_event(args) -> int:
    store = DocumentStore(args.store)
    occurred = args.occurred_at or date.today().isoformat()
    event = TriggerEvent.from_document(
        {"kind": args.kind, "subject": args.subject, "occurredAt": occurred, "payload": args.payload}
    )
    affected = store.record_event(event, actor="cli")
    return _emit({"event": event.to_document(), "affected": affected})


def _cmd_serve(args) -> int:
    server = make_server(args.store, args.port, host=args.host, ui_dir=args.ui_dir)
    host, port = server.server_address[:2]
    print(f"serving on http://{host}:{port} (store: {args.store})", file=sys.stderr, flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nettingdesk", description="Close-out netting workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a controlled-language sentence")
    p.add_argument("sentence")
    p.add_argument("--store", help="store directory whose vocabulary registry to use")
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser("render", help="render a structured sentence file to text")
    p.add_argument("file")
    p.add_argument("--store", help="store directory whose vocabulary registry to use")
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("determine", help="run a netting determination")
    p.add_argument("--opinion", action="append", required=True, metavar="FILE", help="opinion file (repeatable)")
    p.add_argument("--facts", required=True, metavar="FILE")
    p.add_argument("--policy", required=True, metavar="FILE")
    p.add_argument("--assessment", required=True, metavar="FILE")
    p.add_argument("--as-of", required=True, metavar="DATE", help="as-of date, YYYY-MM-DD")
    p.add_argument("--store", help="also persist the determination into this store")
    p.set_defaults(func=_cmd_determine)

    p = sub.add_parser("exposures", help="compute portfolio exposures")
    p.add_argument("--portfolio", required=True, metavar="FILE")
    p.set_defaults(func=_cmd_exposures)

    p = sub.add_parser("costmodel", help="evaluate the sector review-cost model")
    p.add_argument("--params", required=True, metavar="FILE")
    p.add_argument("--day-rate", metavar="N", help="monetize at N per review-day")
    p.add_argument("--json", action="store_true", help="emit the report document instead of the table")
    p.set_defaults(func=_cmd_costmodel)

    p = sub.add_parser("sweep", help="flip expired Yes determinations to No")
    p.add_argument("--as-of", required=True, metavar="DATE")
    p.add_argument("--store", required=True, metavar="DIR")
    p.add_argument("--validity-days", type=int, default=365)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("event", help="record a trigger event and mark dependents stale")
    p.add_argument("--kind", required=True)
    p.add_argument("--subject", required=True)
    p.add_argument("--store", required=True, metavar="DIR")
    p.add_argument("--payload", default="")
    p.add_argument("--occurred-at", default=None)
    p.set_defaults(func=_cmd_event)

    p = sub.add_parser("serve", help="run the local HTTP service")
    p.add_argument("--port", type=int, required=True)
    p.add_argument("--store", required=True, metavar="DIR")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--ui-dir", default=None, metavar="DIR", help="serve this directory at /ui/")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NettingError as exc:
        sys.stderr.write(dumps_document(exc.to_document()))
        return 1


if __name__ == "__main__":
    sys.exit(main())
