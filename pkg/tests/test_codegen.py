import subprocess
import sys

import pytest

from conftest import make_fused, simple_model
from oalrun.codegen import GenError, generate_program, sanitize_identifier, topo_order_classes
from oalrun.ingest import load_model_json
from oalrun.runtime import run_to_completion, start_session
from oalrun.snapshot import snapshot_to_json

import json


def run_generated(source: str) -> str:
    proc = subprocess.run(
        [sys.executable, "-"], input=source, capture_output=True, text=True, timeout=30
    )
    assert proc.returncode == 0, proc.stderr
    return proc.stdout.strip()


# --- topo order -------------------------------------------------------------


def _model(classes, gens=()):
    return load_model_json(
        json.dumps(
            {
                "classes": [
                    {"name": n, "attributes": [], "methods": []} for n in classes
                ],
                "relations": [],
                "generalizations": [{"sub": a, "super": b} for a, b in gens],
            }
        )
    )


def test_topo_superclass_first():
    m = _model(["Ranger", "Person"], [("Ranger", "Person")])
    assert topo_order_classes(m) == ["Person", "Ranger"]


def test_topo_preserves_model_order_without_generalizations():
    m = _model(["B", "A"])
    assert topo_order_classes(m) == ["B", "A"]


def test_topo_chain():
    m = _model(["C", "B", "A"], [("C", "B"), ("B", "A")])
    assert topo_order_classes(m) == ["A", "B", "C"]


# --- sanitize ---------------------------------------------------------------


def test_sanitize_passthrough():
    assert sanitize_identifier("Ranger") == "Ranger"


def test_sanitize_reserved_word():
    assert sanitize_identifier("return") == "return_"


def test_sanitize_collision_chain():
    taken = {"return_"}
    assert sanitize_identifier("return", taken) == "return__"


# --- program generation -------------------------------------------------------


def test_empty_model_program_output():
    fused = make_fused(
        {"classes": [], "relations": [], "generalizations": []}, []
    )
    unit = generate_program(fused, None)
    out = run_generated(unit.source)
    assert out == '{"instances":[],"links":[],"status":"finished","return_value":null}'


def test_reserved_class_name_sanitized():
    model = {
        "classes": [
            {"name": "class", "attributes": [], "methods": []},
            {
                "name": "Main",
                "attributes": [],
                "methods": [{"name": "Run", "static": True, "params": [], "returns": None}],
            },
        ],
        "relations": [],
        "generalizations": [],
    }
    fused = make_fused(model, [("Main", "Run", "create object instance c of class;")])
    # `class` is a lexer identifier? no: it's not an OAL keyword, fine.
    unit = generate_program(fused, ("Main", "Run"))
    assert unit.name_map["class"] == "class_"
    assert "class class_(__OmBase__):" in unit.source
    out = run_generated(unit.source)
    assert '"class":"class"' in out  # model names survive in the dump


def test_generated_text_deterministic(corpus_fixture):
    name, fused, entry, meta = corpus_fixture
    a = generate_program(fused, entry).source
    b = generate_program(fused, entry).source
    assert a == b


def test_differential_equivalence(corpus_fixture):
    name, fused, entry, meta = corpus_fixture
    session = start_session(fused, entry, [])
    expected = snapshot_to_json(run_to_completion(session))
    unit = generate_program(fused, entry)
    got = run_generated(unit.source)
    assert got == expected, name


def test_bodiless_methods_emitted_as_noops():
    model = {
        "classes": [
            {
                "name": "Thing",
                "attributes": [],
                "methods": [
                    {"name": "Mystery", "static": False, "params": [], "returns": None}
                ],
            },
            {
                "name": "Main",
                "attributes": [],
                "methods": [{"name": "Run", "static": True, "params": [], "returns": None}],
            },
        ],
        "relations": [],
        "generalizations": [],
    }
    fused = make_fused(
        model, [("Main", "Run", "create object instance t of Thing;\nt.Mystery();")]
    )
    unit = generate_program(fused, ("Main", "Run"))
    assert "no scripted body" in unit.source
    out = run_generated(unit.source)
    assert '"status":"finished"' in out


def test_local_shadowing_class_name():
    model = {
        "classes": [
            {
                "name": "Dog",
                "attributes": [{"name": "a", "type": "Integer"}],
                "methods": [],
            },
            {
                "name": "Main",
                "attributes": [],
                "methods": [{"name": "Run", "static": True, "params": [], "returns": None}],
            },
        ],
        "relations": [],
        "generalizations": [],
    }
    # the local is itself named Dog; creation must still find the class
    code = "create object instance Dog of Dog;\nDog.a = 3;"
    fused = make_fused(model, [("Main", "Run", code)])
    session = start_session(fused, ("Main", "Run"), [])
    expected = snapshot_to_json(run_to_completion(session))
    got = run_generated(generate_program(fused, ("Main", "Run")).source)
    assert got == expected


def test_keyword_locals_and_methods():
    model = {
        "classes": [
            {
                "name": "Thing",
                "attributes": [{"name": "a", "type": "Integer"}],
                "methods": [
                    {"name": "import", "static": False, "params": [{"name": "lambda", "type": "Integer"}], "returns": "Integer"}
                ],
            },
            {
                "name": "Main",
                "attributes": [],
                "methods": [{"name": "Run", "static": True, "params": [], "returns": None}],
            },
        ],
        "relations": [],
        "generalizations": [],
    }
    methods = [
        ("Thing", "import", "self.a = lambda + 1;\nreturn self.a;"),
        (
            "Main",
            "Run",
            "create object instance global of Thing;\nx = global.import(4);\nglobal.a = x * 2;",
        ),
    ]
    fused = make_fused(model, methods)
    session = start_session(fused, ("Main", "Run"), [])
    expected = snapshot_to_json(run_to_completion(session))
    assert session.status == "finished"
    got = run_generated(generate_program(fused, ("Main", "Run")).source)
    assert got == expected


def test_entry_validation():
    fused = make_fused(simple_model(), [("Main", "Run", "return;")])
    with pytest.raises(GenError):
        generate_program(fused, ("Ghost", "Run"))
    with pytest.raises(GenError):
        generate_program(fused, ("Main", "Ghost"))


def test_entry_with_params_rejected():
    model = simple_model()
    model["classes"][0]["methods"][0]["params"] = [{"name": "n", "type": "Integer"}]
    fused = make_fused(model, [("Main", "Run", "return;")])
    with pytest.raises(GenError) as exc:
        generate_program(fused, ("Main", "Run"))
    assert exc.value.kind == "invalid-entry"


def test_empty_entry_body_rejected():
    fused = make_fused(simple_model(), [("Main", "Run", "")])
    with pytest.raises(GenError) as exc:
        generate_program(fused, ("Main", "Run"))
    assert "at least one command" in str(exc.value)


def test_source_line_comments_present():
    fused = make_fused(simple_model(), [("Main", "Run", "x = 1;\ny = 2;")])
    unit = generate_program(fused, ("Main", "Run"))
    assert "# oal: Main.Run:1" in unit.source
    assert "# oal: Main.Run:2" in unit.source


def test_generated_source_is_valid_python(corpus_fixture):
    name, fused, entry, meta = corpus_fixture
    unit = generate_program(fused, entry)
    compile(unit.source, f"<generated {name}>", "exec")
