import json
from pathlib import Path

import pytest

from oalrun.ingest import FusedModel, fuse, load_method_bundle, load_model_json

FIXTURES = Path(__file__).parent / "fixtures"
CORPUS = FIXTURES / "corpus"


def corpus_names():
    return sorted(p.name for p in CORPUS.iterdir() if (p / "meta.json").exists())


def load_corpus_fixture(name):
    """Returns (fused model, (class, method) entry, meta dict)."""
    d = CORPUS / name
    model = load_model_json((d / "model.json").read_text())
    bundle = load_method_bundle((d / "methods.json").read_text())
    fused = fuse(model, bundle)
    assert not [x for x in fused.parse_diagnostics if x[2].severity == "error"], (
        name,
        fused.parse_diagnostics,
    )
    meta = json.loads((d / "meta.json").read_text())
    cls, meth = meta["entry"].split(".")
    return fused, (cls, meth), meta


@pytest.fixture(params=corpus_names())
def corpus_fixture(request):
    fused, entry, meta = load_corpus_fixture(request.param)
    return request.param, fused, entry, meta


def make_fused(model_doc: dict, methods: list) -> FusedModel:
    """Build a fused model from inline dicts: methods as (cls, name, code)."""
    model = load_model_json(json.dumps(model_doc))
    bundle = load_method_bundle(
        json.dumps(
            {"methods": [{"class": c, "method": m, "code": code} for c, m, code in methods]}
        )
    )
    return fuse(model, bundle)


def simple_model(extra_classes=(), relations=(), generalizations=()):
    """A one-static-entry model skeleton used across unit tests."""
    return {
        "classes": [
            {
                "name": "Main",
                "attributes": [],
                "methods": [{"name": "Run", "static": True, "params": [], "returns": None}],
            },
            *extra_classes,
        ],
        "relations": list(relations),
        "generalizations": list(generalizations),
    }
