import json
from pathlib import Path

import pytest

from oalrun.ingest import (
    DuplicateMethodEntry,
    FuseFailure,
    MalformedDocument,
    MalformedXml,
    SchemaViolation,
    UnresolvableIdref,
    ValidationFailure,
    fuse,
    import_xmi,
    load_method_bundle,
    load_model_json,
    model_to_dict,
    save_model_json,
)

FIXTURES = Path(__file__).parent / "fixtures"


EMPTY = '{"classes":[],"relations":[],"generalizations":[]}'


def test_load_empty_model():
    m = load_model_json(EMPTY)
    assert m.classes == [] and m.relations == [] and m.generalizations == []


def test_missing_classes_key_is_schema_violation():
    with pytest.raises(SchemaViolation):
        load_model_json('{"relations":[],"generalizations":[]}')


def test_unknown_attribute_type_is_validation_failure():
    doc = {
        "classes": [{"name": "A", "attributes": [{"name": "x", "type": "Banana"}], "methods": []}],
        "relations": [],
        "generalizations": [],
    }
    with pytest.raises(ValidationFailure) as exc:
        load_model_json(json.dumps(doc))
    assert any("unknown type" in d.reason for d in exc.value.diagnostics)


def test_malformed_json_reports_position():
    with pytest.raises(MalformedDocument) as exc:
        load_model_json('{"classes": [,]}')
    assert "line 1" in str(exc.value)


def test_mistyped_field():
    with pytest.raises(SchemaViolation):
        load_model_json('{"classes": "nope", "relations": [], "generalizations": []}')


def test_model_json_round_trip(corpus_fixture):
    _, fused, _, _ = corpus_fixture
    text = save_model_json(fused.model)
    again = load_model_json(text)
    assert model_to_dict(again) == model_to_dict(fused.model)
    assert save_model_json(again) == text


def test_unknown_keys_tolerated():
    doc = json.loads(EMPTY)
    doc["entryPoints"] = ["A.B"]
    m = load_model_json(json.dumps(doc))
    assert m.classes == []


def test_load_empty_bundle():
    assert load_method_bundle('{"methods":[]}').entries == []


def test_bundle_single_entry():
    b = load_method_bundle(
        '{"methods":[{"class":"Subject","method":"Attach","code":"return;"}]}'
    )
    assert len(b.entries) == 1
    assert b.entries[0].cls == "Subject"


def test_duplicate_bundle_entry():
    doc = {
        "methods": [
            {"class": "Subject", "method": "Attach", "code": "return;"},
            {"class": "Subject", "method": "Attach", "code": "return;"},
        ]
    }
    with pytest.raises(DuplicateMethodEntry):
        load_method_bundle(json.dumps(doc))


def _subject_model():
    return load_model_json(
        json.dumps(
            {
                "classes": [
                    {
                        "name": "Subject",
                        "attributes": [],
                        "methods": [
                            {"name": "Attach", "static": False, "params": [], "returns": None}
                        ],
                    }
                ],
                "relations": [],
                "generalizations": [],
            }
        )
    )


def test_fuse_binds_matching_entry():
    m = _subject_model()
    b = load_method_bundle('{"methods":[{"class":"Subject","method":"Attach","code":"return;"}]}')
    fused = fuse(m, b)
    assert ("Subject", "Attach") in fused.bodies
    assert fused.unbound == []


def test_fuse_tolerates_unknown_entries():
    m = _subject_model()
    b = load_method_bundle(
        json.dumps(
            {
                "methods": [
                    {"class": "Subject", "method": "Attach", "code": "return;"},
                    {"class": "Ghost", "method": "Boo", "code": "return;"},
                ]
            }
        )
    )
    fused = fuse(m, b)
    assert fused.unbound == [("Ghost", "Boo")]


def test_fuse_collects_parse_failures():
    m = _subject_model()
    b = load_method_bundle(
        json.dumps(
            {
                "methods": [
                    {"class": "Subject", "method": "Attach", "code": "create of;"},
                ]
            }
        )
    )
    with pytest.raises(FuseFailure) as exc:
        fuse(m, b)
    diags = exc.value.fused.parse_diagnostics
    assert diags and diags[0][2].span.line == 1


def test_fuse_fails_only_when_nothing_binds():
    m = _subject_model()
    b = load_method_bundle(
        json.dumps(
            {
                "methods": [
                    {"class": "Subject", "method": "Attach", "code": "return;"},
                    {"class": "Ghost", "method": "Boo", "code": "create of;"},
                ]
            }
        )
    )
    fused = fuse(m, b)  # one bound entry is enough
    assert ("Subject", "Attach") in fused.bodies


def test_fuse_bodies_resolve_against_model(corpus_fixture):
    from oalrun.model import resolve_method

    _, fused, _, _ = corpus_fixture
    for cls, meth in fused.bodies:
        assert resolve_method(fused.model, cls, meth) is not None


# --- XMI ------------------------------------------------------------------


def test_import_single_class():
    text = """<?xml version="1.0"?>
    <xmi:XMI xmlns:xmi="http://schema.omg.org/spec/XMI/2.1" xmlns:uml="http://schema.omg.org/spec/UML/2.1">
      <uml:Model xmi:type="uml:Model" name="m">
        <packagedElement xmi:type="uml:Class" xmi:id="c1" name="Ranger"/>
      </uml:Model>
    </xmi:XMI>"""
    m = import_xmi(text)
    assert [c.name for c in m.classes] == ["Ranger"]
    assert m.classes[0].attributes == ()


def test_import_generalization_by_idref():
    text = """<?xml version="1.0"?>
    <xmi:XMI xmlns:xmi="http://schema.omg.org/spec/XMI/2.1" xmlns:uml="http://schema.omg.org/spec/UML/2.1">
      <uml:Model xmi:type="uml:Model" name="m">
        <packagedElement xmi:type="uml:Class" xmi:id="c1" name="Person"/>
        <packagedElement xmi:type="uml:Class" xmi:id="c2" name="Ranger">
          <generalization xmi:type="uml:Generalization" xmi:id="g1" general="c1"/>
        </packagedElement>
      </uml:Model>
    </xmi:XMI>"""
    m = import_xmi(text)
    assert m.generalizations == [("Ranger", "Person")]


def test_import_unresolvable_member_end():
    text = """<?xml version="1.0"?>
    <xmi:XMI xmlns:xmi="http://schema.omg.org/spec/XMI/2.1" xmlns:uml="http://schema.omg.org/spec/UML/2.1">
      <uml:Model xmi:type="uml:Model" name="m">
        <packagedElement xmi:type="uml:Class" xmi:id="c1" name="A"/>
        <packagedElement xmi:type="uml:Association" xmi:id="a1">
          <memberEnd xmi:idref="missing1"/>
          <memberEnd xmi:idref="missing2"/>
        </packagedElement>
      </uml:Model>
    </xmi:XMI>"""
    with pytest.raises(UnresolvableIdref):
        import_xmi(text)


def test_import_malformed_xml():
    with pytest.raises(MalformedXml):
        import_xmi("<xmi:XMI>")


def test_import_skips_association_end_attributes():
    text = """<?xml version="1.0"?>
    <xmi:XMI xmlns:xmi="http://schema.omg.org/spec/XMI/2.1" xmlns:uml="http://schema.omg.org/spec/UML/2.1">
      <uml:Model xmi:type="uml:Model" name="m">
        <packagedElement xmi:type="uml:Class" xmi:id="c1" name="A">
          <ownedAttribute xmi:type="uml:Property" xmi:id="p1" name="other" association="a1" type="c1"/>
          <ownedAttribute xmi:type="uml:Property" xmi:id="p2" name="real_attr"/>
        </packagedElement>
      </uml:Model>
    </xmi:XMI>"""
    m = import_xmi(text)
    assert [a.name for a in m.classes[0].attributes] == ["real_attr"]
    assert m.classes[0].attributes[0].type == "String"  # untyped defaults to String


def test_import_golden_fixture():
    warnings = []
    m = import_xmi((FIXTURES / "xmi" / "minimal_ea.xmi").read_text(), warnings)
    golden = (FIXTURES / "xmi" / "minimal_ea.model.json").read_text()
    assert save_model_json(m) == golden
    assert any("LegacyType" in w for w in warnings)


def test_import_save_load_equals_direct_import():
    m1 = import_xmi((FIXTURES / "xmi" / "minimal_ea.xmi").read_text())
    m2 = load_model_json(save_model_json(m1))
    assert model_to_dict(m1) == model_to_dict(m2)
