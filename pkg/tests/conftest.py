from __future__ import annotations

import importlib.resources
from datetime import datetime, timezone

import pytest

from nettingdesk.documents import loads_document
from nettingdesk.store import DocumentStore

_SAMPLES = importlib.resources.files("nettingdesk").joinpath("data/samples")
_DATA = importlib.resources.files("nettingdesk").joinpath("data")


def load_sample(name: str):
    return loads_document(_SAMPLES.joinpath(name).read_text(encoding="utf-8"))


def load_data(name: str):
    return loads_document(_DATA.joinpath(name).read_text(encoding="utf-8"))


def sample_path(name: str) -> str:
    return str(_SAMPLES.joinpath(name))


def data_path(name: str) -> str:
    return str(_DATA.joinpath(name))


@pytest.fixture
def opinion_doc():
    return load_sample("opinion_en_isda.json")


@pytest.fixture
def facts_doc():
    return load_sample("facts_acme.json")


@pytest.fixture
def policy_doc():
    return load_sample("policy_three_factor.json")


@pytest.fixture
def assessment_doc():
    doc = dict(load_sample("assessment_acme.json"))
    doc.pop("id", None)
    return doc


@pytest.fixture
def frozen_clock():
    moment = datetime(2025, 9, 1, 12, 0, 0, tzinfo=timezone.utc)
    return lambda: moment


@pytest.fixture
def store(tmp_path, frozen_clock):
    return DocumentStore(tmp_path / "store", clock=frozen_clock)
