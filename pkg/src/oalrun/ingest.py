"""Loading and saving models, method bundles, and fusing them for execution.

Three inputs exist: the model JSON format (canonical save form), an XMI 2.1
subset as exported by Enterprise Architect-style tools, and method bundles
(JSON) holding action-language source per (class, method).  A model file
and a methods file are deliberately independent: fusion binds whatever
matches and reports the rest as unbound instead of failing.
"""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .model import (
    AttributeDef,
    ClassDef,
    ClassModel,
    MethodDef,
    ModelDiagnostic,
    RelationDef,
    resolve_method,
    validate_model,
)
from .oal.ast import Diagnostic, MethodAst
from .oal.parser import parse_method_body


class IngestError(Exception):
    kind = "ingest-error"


class MalformedDocument(IngestError):
    kind = "malformed-document"


class SchemaViolation(IngestError):
    kind = "schema-violation"


class ValidationFailure(IngestError):
    kind = "validation-failure"

    def __init__(self, diagnostics: List[ModelDiagnostic]):
        self.diagnostics = diagnostics
        summary = "; ".join(str(d) for d in diagnostics[:5])
        if len(diagnostics) > 5:
            summary += f" (+{len(diagnostics) - 5} more)"
        super().__init__(f"model validation failed: {summary}")


class DuplicateMethodEntry(IngestError):
    kind = "duplicate-method-entry"


class MalformedXml(IngestError):
    kind = "malformed-xml"


class UnresolvableIdref(IngestError):
    kind = "unresolvable-idref"


class FuseFailure(IngestError):
    kind = "fuse-failure"

    def __init__(self, message: str, fused: "FusedModel"):
        super().__init__(message)
        self.fused = fused


# --- method bundles -------------------------------------------------------


@dataclass(frozen=True)
class BundleEntry:
    cls: str
    method: str
    code: str


@dataclass
class MethodBundle:
    entries: List[BundleEntry] = field(default_factory=list)


@dataclass
class FusedModel:
    """A validated model bound to parsed method bodies.

    `bodies` is keyed by the owning class (per method resolution), so a
    subclass alias in the bundle lands on the class that declares the
    method.  `unbound` keeps entries naming unknown classes or methods.
    """

    model: ClassModel
    bodies: Dict[Tuple[str, str], MethodAst] = field(default_factory=dict)
    unbound: List[Tuple[str, str]] = field(default_factory=list)
    parse_diagnostics: List[Tuple[str, str, Diagnostic]] = field(default_factory=list)

    def body_for(self, cls: str, method: str) -> Optional[MethodAst]:
        resolved = resolve_method(self.model, cls, method)
        if resolved is None:
            return None
        owner, _ = resolved
        return self.bodies.get((owner, method))

    def callable_entries(self) -> List[Tuple[str, str]]:
        """(class, method) pairs with at least one command, sorted."""
        return sorted(k for k, ast in self.bodies.items() if not ast.is_empty())


# --- JSON helpers ----------------------------------------------------------


def _want(obj, key, typ, where, *, optional=False, default=None):
    if not isinstance(obj, dict):
        raise SchemaViolation(f"{where}: expected an object")
    if key not in obj:
        if optional:
            return default
        raise SchemaViolation(f"{where}: missing field {key!r}")
    val = obj[key]
    if typ is float:  # plain bools must not pass as numbers
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise SchemaViolation(f"{where}: field {key!r} must be a number")
        return val
    if typ is bool and not isinstance(val, bool):
        raise SchemaViolation(f"{where}: field {key!r} must be a boolean")
    if typ is str and not isinstance(val, str):
        raise SchemaViolation(f"{where}: field {key!r} must be a string")
    if typ is list and not isinstance(val, list):
        raise SchemaViolation(f"{where}: field {key!r} must be an array")
    return val


def _parse_json(text: str) -> object:
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise MalformedDocument(
            f"line {err.lineno} column {err.colno}: {err.msg}"
        ) from err


def load_model_json(text: str) -> ClassModel:
    """Parse and validate the model JSON format.

    Unknown keys are tolerated (the reader is forward-compatible); the
    canonical writer is :func:`save_model_json`.
    """
    doc = _parse_json(text)
    if not isinstance(doc, dict):
        raise SchemaViolation("top level: expected an object")
    classes = []
    for i, cobj in enumerate(_want(doc, "classes", list, "top level")):
        where = f"classes[{i}]"
        name = _want(cobj, "name", str, where)
        attrs = []
        for j, aobj in enumerate(_want(cobj, "attributes", list, where, optional=True, default=[])):
            aw = f"{where}.attributes[{j}]"
            attrs.append(AttributeDef(_want(aobj, "name", str, aw), _want(aobj, "type", str, aw)))
        methods = []
        for j, mobj in enumerate(_want(cobj, "methods", list, where, optional=True, default=[])):
            mw = f"{where}.methods[{j}]"
            params = []
            for k, pobj in enumerate(_want(mobj, "params", list, mw, optional=True, default=[])):
                pw = f"{mw}.params[{k}]"
                params.append((_want(pobj, "name", str, pw), _want(pobj, "type", str, pw)))
            returns = mobj.get("returns") if isinstance(mobj, dict) else None
            if returns is not None and not isinstance(returns, str):
                raise SchemaViolation(f"{mw}: field 'returns' must be a string or null")
            methods.append(
                MethodDef(
                    _want(mobj, "name", str, mw),
                    _want(mobj, "static", bool, mw, optional=True, default=False),
                    tuple(params),
                    returns,
                )
            )
        classes.append(ClassDef(name, tuple(attrs), tuple(methods)))

    relations = []
    for i, robj in enumerate(_want(doc, "relations", list, "top level")):
        where = f"relations[{i}]"
        relations.append(
            RelationDef(
                _want(robj, "id", str, where),
                _want(robj, "kind", str, where),
                _want(robj, "from", str, where),
                _want(robj, "to", str, where),
                _want(robj, "fromMult", str, where, optional=True, default="1"),
                _want(robj, "toMult", str, where, optional=True, default="0..*"),
            )
        )

    gens = []
    for i, gobj in enumerate(_want(doc, "generalizations", list, "top level")):
        where = f"generalizations[{i}]"
        gens.append((_want(gobj, "sub", str, where), _want(gobj, "super", str, where)))

    model = ClassModel(classes, relations, gens)
    diags = validate_model(model)
    if diags:
        raise ValidationFailure(diags)
    return model


def model_to_dict(m: ClassModel) -> dict:
    """Canonical dict form of a model (field order fixed)."""
    return {
        "classes": [
            {
                "name": c.name,
                "attributes": [{"name": a.name, "type": a.type} for a in c.attributes],
                "methods": [
                    {
                        "name": meth.name,
                        "static": meth.is_static,
                        "params": [{"name": n, "type": t} for n, t in meth.params],
                        "returns": meth.returns,
                    }
                    for meth in c.methods
                ],
            }
            for c in m.classes
        ],
        "relations": [
            {
                "id": r.id,
                "kind": r.kind,
                "from": r.from_cls,
                "to": r.to_cls,
                "fromMult": r.from_mult,
                "toMult": r.to_mult,
            }
            for r in m.relations
        ],
        "generalizations": [{"sub": sub, "super": sup} for sub, sup in m.generalizations],
    }


def save_model_json(m: ClassModel) -> str:
    return json.dumps(model_to_dict(m), indent=2) + "\n"


def load_method_bundle(text: str) -> MethodBundle:
    doc = _parse_json(text)
    if not isinstance(doc, dict):
        raise SchemaViolation("top level: expected an object")
    entries = []
    seen = set()
    for i, eobj in enumerate(_want(doc, "methods", list, "top level")):
        where = f"methods[{i}]"
        cls = _want(eobj, "class", str, where)
        method = _want(eobj, "method", str, where)
        code = _want(eobj, "code", str, where)
        if (cls, method) in seen:
            raise DuplicateMethodEntry(f"duplicate entry for {cls}.{method}")
        seen.add((cls, method))
        entries.append(BundleEntry(cls, method, code))
    return MethodBundle(entries)


def bundle_to_dict(b: MethodBundle) -> dict:
    return {
        "methods": [
            {"class": e.cls, "method": e.method, "code": e.code} for e in b.entries
        ]
    }


def save_method_bundle(b: MethodBundle) -> str:
    return json.dumps(bundle_to_dict(b), indent=2) + "\n"


# --- fusion -----------------------------------------------------------------


def fuse(model: ClassModel, bundle: MethodBundle) -> FusedModel:
    """Bind a method bundle onto a validated model.

    Tolerant by design: entries naming unknown classes/methods land in
    `unbound`, parse failures are collected per entry.  Raises FuseFailure
    only when a non-empty bundle binds nothing at all.
    """
    fused = FusedModel(model)
    bound = 0
    for entry in bundle.entries:
        result = parse_method_body(entry.code)
        for diag in result.diagnostics:
            fused.parse_diagnostics.append((entry.cls, entry.method, diag))
        if model.class_named(entry.cls) is None:
            fused.unbound.append((entry.cls, entry.method))
            continue
        resolved = resolve_method(model, entry.cls, entry.method)
        if resolved is None:
            fused.unbound.append((entry.cls, entry.method))
            continue
        owner, _ = resolved
        if not result.ok:
            continue
        key = (owner, entry.method)
        if key in fused.bodies:
            fused.parse_diagnostics.append(
                (
                    entry.cls,
                    entry.method,
                    Diagnostic(
                        "warning",
                        f"conflicting binding for {owner}.{entry.method}; keeping the first",
                        result.ast.statements[0].span if result.ast.statements else _origin_span(),
                    ),
                )
            )
            continue
        fused.bodies[key] = result.ast
        bound += 1
    if bundle.entries and bound == 0:
        raise FuseFailure("no bundle entry could be bound to the model", fused)
    return fused


def _origin_span():
    from .oal.ast import SourceSpan

    return SourceSpan(1, 0, 0)


# --- XMI import -------------------------------------------------------------

_PRIMITIVE_HINTS = {
    "integer": "Integer",
    "int": "Integer",
    "long": "Integer",
    "real": "Real",
    "double": "Real",
    "float": "Real",
    "boolean": "Boolean",
    "bool": "Boolean",
    "string": "String",
}

_HANDLED_TYPES = ("Class", "Association", "Package", "Model")


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1].rsplit(":", 1)[-1]


def _xmi_attr(el: ET.Element, name: str) -> Optional[str]:
    """Namespaced attribute lookup by local name (xmi:type, xmi:id, ...)."""
    for key, val in el.attrib.items():
        if "}" in key and _local(key) == name:
            return val
    return el.attrib.get(f"xmi:{name}")


def _type_localname(el: ET.Element) -> Optional[str]:
    t = _xmi_attr(el, "type")
    if t is None:
        return None
    return t.rsplit(":", 1)[-1]


def import_xmi(text: str, warnings: Optional[List[str]] = None) -> ClassModel:
    """Extract the supported XMI 2.1 subset into a validated model.

    Unsupported elements are skipped with a warning (appended to the
    optional `warnings` list), never fatal.  Classes import in document
    order; relation ids are assigned R1, R2, ... in document order.
    """
    if warnings is None:
        warnings = []
    try:
        root = ET.fromstring(text)
    except ET.ParseError as err:
        raise MalformedXml(str(err)) from err

    class_elems: List[ET.Element] = []
    assoc_elems: List[ET.Element] = []
    id_to_class: Dict[str, str] = {}
    # property records: xmi:id -> element, for resolving association ends
    prop_by_id: Dict[str, ET.Element] = {}

    for el in root.iter():
        if _local(el.tag) != "packagedElement":
            continue
        tname = _type_localname(el)
        if tname == "Class":
            class_elems.append(el)
            el_id = _xmi_attr(el, "id")
            name = el.attrib.get("name", "")
            if el_id and name:
                id_to_class[el_id] = name
        elif tname == "Association":
            assoc_elems.append(el)
        elif tname in ("Package", "Model", None):
            pass  # containers: children already reachable via iter()
        else:
            warnings.append(
                f"skipped unsupported element uml:{tname} {el.attrib.get('name', '')!r}"
            )

    for el in root.iter():
        local = _local(el.tag)
        if local in ("ownedAttribute", "ownedEnd"):
            pid = _xmi_attr(el, "id")
            if pid:
                prop_by_id[pid] = el

    def resolve_value_type(el: ET.Element) -> str:
        idref = el.attrib.get("type")
        if idref:
            if idref in id_to_class:
                return id_to_class[idref]
            hint = _PRIMITIVE_HINTS.get(idref.rsplit("_", 1)[-1].lower())
            if hint:
                return hint
        for child in el:
            if _local(child.tag) == "type":
                ref = child.attrib.get("href") or _xmi_attr(child, "idref") or ""
                if ref in id_to_class:
                    return id_to_class[ref]
                tail = ref.rsplit("#", 1)[-1].rsplit("/", 1)[-1]
                hint = _PRIMITIVE_HINTS.get(tail.rsplit("_", 1)[-1].lower())
                if hint:
                    return hint
        return "String"

    classes: List[ClassDef] = []
    generalizations: List[Tuple[str, str]] = []
    for cel in class_elems:
        cname = cel.attrib.get("name")
        if not cname:
            warnings.append("skipped unnamed class")
            continue
        attrs: List[AttributeDef] = []
        methods: List[MethodDef] = []
        for child in cel:
            local = _local(child.tag)
            if local == "ownedAttribute":
                if child.attrib.get("association") or _xmi_attr(child, "association"):
                    continue  # association end, not a plain attribute
                aname = child.attrib.get("name")
                if not aname:
                    warnings.append(f"skipped unnamed attribute in class {cname}")
                    continue
                attrs.append(AttributeDef(aname, resolve_value_type(child)))
            elif local == "ownedOperation":
                oname = child.attrib.get("name")
                if not oname:
                    warnings.append(f"skipped unnamed operation in class {cname}")
                    continue
                is_static = child.attrib.get("isStatic", "false") == "true"
                params: List[Tuple[str, str]] = []
                returns: Optional[str] = None
                for p in child:
                    if _local(p.tag) != "ownedParameter":
                        continue
                    direction = p.attrib.get("direction", "in")
                    if direction == "return":
                        returns = resolve_value_type(p)
                        continue
                    pname = p.attrib.get("name")
                    if not pname:
                        warnings.append(
                            f"skipped unnamed parameter of {cname}.{oname}"
                        )
                        continue
                    params.append((pname, resolve_value_type(p)))
                methods.append(MethodDef(oname, is_static, tuple(params), returns))
            elif local == "generalization":
                general = child.attrib.get("general") or _xmi_attr(child, "general")
                if not general:
                    for sub in child:
                        if _local(sub.tag) == "general":
                            general = _xmi_attr(sub, "idref") or sub.attrib.get("href")
                if not general:
                    warnings.append(f"skipped generalization without target in {cname}")
                    continue
                general = general.rsplit("#", 1)[-1]
                if general not in id_to_class:
                    raise UnresolvableIdref(
                        f"generalization in class {cname} references unknown id {general!r}"
                    )
                generalizations.append((cname, id_to_class[general]))
        classes.append(ClassDef(cname, tuple(attrs), tuple(methods)))

    def end_multiplicity(prop: ET.Element) -> str:
        lower, upper = None, None
        for child in prop:
            local = _local(child.tag)
            if local == "lowerValue":
                lower = child.attrib.get("value", "0")
            elif local == "upperValue":
                upper = child.attrib.get("value", "*")
        if lower is None and upper is None:
            return "1"  # UML default multiplicity
        lower = lower if lower is not None else "0"
        upper = upper if upper is not None else "*"
        unbounded = upper in ("*", "-1")
        if lower == "1" and upper == "1":
            return "1"
        if lower == "0" and upper == "1":
            return "0..1"
        if lower == "1" and unbounded:
            return "1..*"
        if lower == "0" and unbounded:
            return "0..*"
        return "0..*"

    relations: List[RelationDef] = []
    counter = 1
    for ael in assoc_elems:
        ends: List[ET.Element] = []
        for child in ael:
            local = _local(child.tag)
            if local == "memberEnd":
                idref = _xmi_attr(child, "idref") or child.attrib.get("idref")
                if not idref:
                    continue
                if idref not in prop_by_id:
                    raise UnresolvableIdref(
                        f"association memberEnd references unknown id {idref!r}"
                    )
                ends.append(prop_by_id[idref])
            elif local == "ownedEnd":
                ends.append(child)
        # memberEnd often repeats ownedEnd properties; de-duplicate by identity
        unique: List[ET.Element] = []
        for e in ends:
            if all(e is not u for u in unique):
                unique.append(e)
        if len(unique) != 2:
            warnings.append(
                f"skipped association {ael.attrib.get('name', '')!r} with {len(unique)} ends"
            )
            continue

        def end_class(prop: ET.Element) -> str:
            idref = prop.attrib.get("type") or _xmi_attr(prop, "type")
            if idref and "}" not in idref and idref in id_to_class:
                return id_to_class[idref]
            for child in prop:
                if _local(child.tag) == "type":
                    ref = _xmi_attr(child, "idref") or child.attrib.get("href") or ""
                    ref = ref.rsplit("#", 1)[-1]
                    if ref in id_to_class:
                        return id_to_class[ref]
            raise UnresolvableIdref(
                f"association end {prop.attrib.get('name', '')!r} has no resolvable type"
            )

        first, second = unique[0], unique[1]
        kind = "association"
        from_end, to_end = first, second
        for e in (first, second):
            if e.attrib.get("aggregation") == "composite":
                kind = "composition"
                from_end = e  # composite aggregation marks the whole side
                to_end = second if e is first else first
                break
        relations.append(
            RelationDef(
                f"R{counter}",
                kind,
                end_class(from_end),
                end_class(to_end),
                end_multiplicity(from_end),
                end_multiplicity(to_end),
            )
        )
        counter += 1

    model = ClassModel(classes, relations, generalizations)
    diags = validate_model(model)
    if diags:
        raise ValidationFailure(diags)
    return model
