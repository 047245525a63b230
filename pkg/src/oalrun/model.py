"""Static layer: the in-memory class model and its validation.

A :class:`ClassModel` holds classes (attributes + method signatures),
binary relations and single-inheritance generalizations.  Instances are
immutable after validation and safe to share.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .values import PRIMITIVE_TYPES, Value, default_for_type

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
RELATION_ID_RE = re.compile(r"R[0-9]+\Z")

MULTIPLICITIES = ("1", "0..1", "0..*", "1..*")

RELATION_KINDS = ("association", "composition")


@dataclass(frozen=True)
class AttributeDef:
    name: str
    type: str  # "Integer" | "Real" | "Boolean" | "String" | class name


@dataclass(frozen=True)
class MethodDef:
    name: str
    is_static: bool = False
    params: Tuple[Tuple[str, str], ...] = ()  # (name, type)
    returns: Optional[str] = None


@dataclass(frozen=True)
class ClassDef:
    name: str
    attributes: Tuple[AttributeDef, ...] = ()
    methods: Tuple[MethodDef, ...] = ()


@dataclass(frozen=True)
class RelationDef:
    id: str  # R<n>
    kind: str  # association | composition
    from_cls: str
    to_cls: str
    from_mult: str = "1"
    to_mult: str = "0..*"


@dataclass(frozen=True)
class ModelDiagnostic:
    """A single validation finding. subject names the offending element."""

    subject: str
    reason: str

    def __str__(self) -> str:
        return f"{self.subject}: {self.reason}"


@dataclass
class ClassModel:
    classes: List[ClassDef] = field(default_factory=list)
    relations: List[RelationDef] = field(default_factory=list)
    generalizations: List[Tuple[str, str]] = field(default_factory=list)  # (sub, super)

    def class_named(self, name: str) -> Optional[ClassDef]:
        for c in self.classes:
            if c.name == name:
                return c
        return None

    def relation_by_id(self, rel_id: str) -> Optional[RelationDef]:
        for r in self.relations:
            if r.id == rel_id:
                return r
        return None

    def super_of(self, name: str) -> Optional[str]:
        for sub, sup in self.generalizations:
            if sub == name:
                return sup
        return None

    def ancestry(self, name: str) -> List[str]:
        """Class name followed by its superclasses, nearest first.

        Guards against cycles so it is usable on not-yet-validated models.
        """
        chain: List[str] = []
        seen = set()
        cur: Optional[str] = name
        while cur is not None and cur not in seen:
            chain.append(cur)
            seen.add(cur)
            cur = self.super_of(cur)
        return chain

    def is_kind_of(self, cls: str, ancestor: str) -> bool:
        return ancestor in self.ancestry(cls)


def validate_model(m: ClassModel) -> List[ModelDiagnostic]:
    """Check every model invariant; an empty result means the model is valid.

    Diagnostics form an order-independent multiset: permuting the class
    list permutes the output but never changes its contents.
    """
    diags: List[ModelDiagnostic] = []
    class_names = [c.name for c in m.classes]
    known = set(class_names)

    def valid_type(t: str) -> bool:
        return t in PRIMITIVE_TYPES or t in known

    seen_names = set()
    for c in m.classes:
        if not c.name:
            diags.append(ModelDiagnostic("<class>", "empty class name"))
        elif not IDENT_RE.match(c.name):
            diags.append(ModelDiagnostic(c.name, "class name is not a valid identifier"))
        if c.name in seen_names:
            diags.append(ModelDiagnostic(c.name, "duplicate class name"))
        seen_names.add(c.name)

    # Generalizations: endpoints exist, single inheritance, acyclic.
    sub_seen = set()
    for sub, sup in m.generalizations:
        for end in (sub, sup):
            if end not in known:
                diags.append(ModelDiagnostic(f"{sub}->{sup}", f"unknown class {end}"))
        if sub in sub_seen:
            diags.append(
                ModelDiagnostic(sub, "multiple superclasses (single inheritance only)")
            )
        sub_seen.add(sub)

    parent = {sub: sup for sub, sup in m.generalizations}
    for start in sorted(parent):
        cur, trail = start, [start]
        while cur in parent:
            cur = parent[cur]
            if cur == start:
                diags.append(
                    ModelDiagnostic("->".join(trail + [start]), "generalization cycle")
                )
                break
            if cur in trail:
                break  # cycle reported from its own smallest entry point
            trail.append(cur)

    has_cycle = any(d.reason == "generalization cycle" for d in diags)

    for c in m.classes:
        # Attribute names unique across the class and its ancestors.
        inherited = set()
        if not has_cycle:
            for anc in m.ancestry(c.name)[1:]:
                anc_def = m.class_named(anc)
                if anc_def:
                    inherited.update(a.name for a in anc_def.attributes)
        attr_seen = set()
        for a in c.attributes:
            if not IDENT_RE.match(a.name):
                diags.append(
                    ModelDiagnostic(f"{c.name}.{a.name}", "attribute name is not a valid identifier")
                )
            if a.name in attr_seen:
                diags.append(ModelDiagnostic(f"{c.name}.{a.name}", "duplicate attribute"))
            elif a.name in inherited:
                diags.append(
                    ModelDiagnostic(f"{c.name}.{a.name}", "attribute shadows inherited attribute")
                )
            attr_seen.add(a.name)
            if not valid_type(a.type):
                diags.append(
                    ModelDiagnostic(f"{c.name}.{a.name}", f"unknown type {a.type}")
                )

        meth_seen = set()
        for meth in c.methods:
            if not IDENT_RE.match(meth.name):
                diags.append(
                    ModelDiagnostic(f"{c.name}.{meth.name}", "method name is not a valid identifier")
                )
            if meth.name in meth_seen:
                diags.append(
                    ModelDiagnostic(f"{c.name}.{meth.name}", "duplicate method (no overloading)")
                )
            meth_seen.add(meth.name)
            param_seen = set()
            for pname, ptype in meth.params:
                if pname == "self":
                    diags.append(
                        ModelDiagnostic(f"{c.name}.{meth.name}", "parameter name 'self' is reserved")
                    )
                elif not IDENT_RE.match(pname):
                    diags.append(
                        ModelDiagnostic(
                            f"{c.name}.{meth.name}", f"parameter {pname!r} is not a valid identifier"
                        )
                    )
                if pname in param_seen:
                    diags.append(
                        ModelDiagnostic(f"{c.name}.{meth.name}", f"duplicate parameter {pname}")
                    )
                param_seen.add(pname)
                if not valid_type(ptype):
                    diags.append(
                        ModelDiagnostic(f"{c.name}.{meth.name}", f"unknown type {ptype}")
                    )
            if meth.returns is not None and not valid_type(meth.returns):
                diags.append(
                    ModelDiagnostic(f"{c.name}.{meth.name}", f"unknown type {meth.returns}")
                )

    rel_seen = set()
    for r in m.relations:
        if not RELATION_ID_RE.match(r.id):
            diags.append(ModelDiagnostic(r.id, "relation id must match R<n>"))
        if r.id in rel_seen:
            diags.append(ModelDiagnostic(r.id, "duplicate relation id"))
        rel_seen.add(r.id)
        if r.kind not in RELATION_KINDS:
            diags.append(ModelDiagnostic(r.id, f"unknown relation kind {r.kind}"))
        for end in (r.from_cls, r.to_cls):
            if end not in known:
                diags.append(ModelDiagnostic(r.id, f"unknown class {end}"))
        for mult in (r.from_mult, r.to_mult):
            if mult not in MULTIPLICITIES:
                diags.append(ModelDiagnostic(r.id, f"invalid multiplicity {mult!r}"))

    return diags


def resolve_method(
    m: ClassModel, cls: str, method: str
) -> Optional[Tuple[str, MethodDef]]:
    """Find the class owning `method` along the generalization chain.

    Lookup starts at `cls` and walks upward; a subclass definition shadows
    the superclass one. Returns (owning class name, MethodDef), or None.
    """
    for name in m.ancestry(cls):
        c = m.class_named(name)
        if c is None:
            continue
        for meth in c.methods:
            if meth.name == method:
                return name, meth
    return None


def all_attributes(m: ClassModel, cls: str) -> List[AttributeDef]:
    """Own plus inherited attributes, root-most ancestors first."""
    out: List[AttributeDef] = []
    for name in reversed(m.ancestry(cls)):
        c = m.class_named(name)
        if c:
            out.extend(c.attributes)
    return out


def default_attribute_value(type_name: str) -> Value:
    """Zero/empty/null default for a declared attribute type."""
    return default_for_type(type_name)
