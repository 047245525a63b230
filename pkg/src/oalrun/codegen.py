"""Single-file Python program generation from a fused model.

The output defines every class and method from the model and embeds a
miniature runtime (heap, per-class registries, link table, cascade
deletes, deterministic selects) that mirrors the interpreter's semantics,
plus a ``__dump_state__()`` routine printing the canonical snapshot JSON.
Running the file with an entry configured therefore prints exactly the
bytes the interpreter's final snapshot serializes to — the differential
oracle the test corpus leans on.

Generation is deterministic: the same fused model yields the same bytes.
"""

from __future__ import annotations

import keyword
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .ingest import FusedModel
from .model import ClassModel, MethodDef, all_attributes, resolve_method
from .oal import ast as oal_ast

_PY_RESERVED = frozenset(keyword.kwlist) | {"True", "False", "None", "match", "case"}

# Module-level names the preamble claims; model identifiers must not
# collide with them.
_PREAMBLE_NAMES = frozenset(
    {
        "json",
        "__ModelError__",
        "__OmBase__",
        "__om_void__",
        "__om_heap__",
        "__om_next_id__",
        "__om_links__",
        "__om_registry__",
        "__om_ancestors__",
        "__om_defaults__",
        "__om_relations__",
        "__om_status__",
        "__om_return__",
        "__om_new__",
        "__om_deref__",
        "__om_getattr__",
        "__om_setattr__",
        "__om_chkval__",
        "__om_div__",
        "__om_empty__",
        "__om_kind_of__",
        "__om_relate__",
        "__om_unrelate__",
        "__om_delete__",
        "__om_delete_cascade__",
        "__om_select_any__",
        "__om_select_many__",
        "__om_step_forward__",
        "__om_navigate__",
        "__om_fail__",
        "__om_fail_unknown__",
        "__om_fail_method__",
        "__om_no_self__",
        "__om_no_selected__",
        "__om_tag__",
        "__om_link_key__",
        "__dump_state__",
        "__om_run__",
    }
)


class GenError(Exception):
    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


@dataclass
class GenUnit:
    source: str
    name_map: Dict[str, str]  # model class name -> emitted class name
    entry: Optional[Tuple[str, str]] = None


def sanitize_identifier(name: str, taken: Optional[Set[str]] = None) -> str:
    """Make `name` safe to emit: append `_` while it collides with a
    target reserved word or a previously emitted name."""
    taken = taken if taken is not None else set()
    out = name
    while out in _PY_RESERVED or out in _PREAMBLE_NAMES or out in taken:
        out += "_"
    return out


def topo_order_classes(m: ClassModel) -> List[str]:
    """Class names with superclasses before subclasses, stable otherwise."""
    parent = dict(m.generalizations)
    known = {c.name for c in m.classes}
    placed: Set[str] = set()
    result: List[str] = []

    def place(name: str):
        if name in placed:
            return
        placed.add(name)
        sup = parent.get(name)
        if sup is not None and sup in known:
            place(sup)
        result.append(name)

    for c in m.classes:
        place(c.name)
    return result


def generate_program(
    fused: FusedModel, entry: Optional[Tuple[str, str]] = None
) -> GenUnit:
    """Emit the single-file program for a fused model.

    The entry method, when given, must resolve, have at least one command
    and take no parameters (the generated main guard passes none).
    """
    bad = [d for c, m, d in fused.parse_diagnostics if d.severity == "error"]
    if bad:
        raise GenError(
            "unbound-body", f"fused model carries {len(bad)} parse error(s)"
        )
    model = fused.model

    entry_info = None
    if entry is not None:
        cls_name, meth_name = entry
        if model.class_named(cls_name) is None:
            raise GenError("invalid-entry", f"unknown class {cls_name}")
        resolved = resolve_method(model, cls_name, meth_name)
        if resolved is None:
            raise GenError("invalid-entry", f"unknown method {cls_name}.{meth_name}")
        owner, mdef = resolved
        body = fused.bodies.get((owner, meth_name))
        if body is None or body.is_empty():
            raise GenError(
                "invalid-entry",
                f"entry method {cls_name}.{meth_name} must have at least one command in it",
            )
        if mdef.params:
            raise GenError(
                "invalid-entry",
                f"entry method {cls_name}.{meth_name} must take no parameters",
            )
        entry_info = (cls_name, meth_name, mdef)

    # Global name maps: classes share the module namespace; method names
    # must sanitize identically across classes so dynamic dispatch works.
    class_map: Dict[str, str] = {}
    taken: Set[str] = set()
    for c in model.classes:
        emitted = sanitize_identifier(c.name, taken)
        class_map[c.name] = emitted
        taken.add(emitted)
    method_map: Dict[str, str] = {}
    method_taken: Set[str] = {"__init__"}
    for c in model.classes:
        for meth in c.methods:
            if meth.name not in method_map:
                emitted = sanitize_identifier(meth.name, method_taken)
                method_map[meth.name] = emitted
                method_taken.add(emitted)

    w = _Writer()
    _emit_preamble(w, fused, class_map)
    _emit_classes(w, fused, class_map, method_map)
    _emit_dump(w)
    _emit_main(w, class_map, method_map, entry_info)
    return GenUnit(w.text(), class_map, entry)


class _Writer:
    def __init__(self):
        self.lines: List[str] = []

    def put(self, line: str = "", indent: int = 0):
        self.lines.append("    " * indent + line if line else "")

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def _emit_preamble(w: _Writer, fused: FusedModel, class_map: Dict[str, str]):
    model = fused.model
    w.put("#!/usr/bin/env python3")
    w.put('"""Generated object-model program; regenerate instead of editing."""')
    w.put()
    w.put("import json")
    w.put()
    w.put()
    w.put("class __ModelError__(Exception):")
    w.put("    pass")
    w.put()
    w.put()
    w.put("class __OmBase__:")
    w.put("    pass")
    w.put()
    w.put()
    w.put("__om_void__ = object()")
    w.put("__om_heap__ = {}")
    w.put("__om_next_id__ = [1]")
    w.put('__om_status__ = ["finished"]')
    w.put("__om_return__ = [__om_void__]")
    # (1) link table: relation id -> list of (from, to) instance pairs
    rel_ids = ", ".join(f'"{r.id}": []' for r in model.relations)
    w.put("__om_links__ = {%s}" % rel_ids)
    regs = ", ".join(f'"{c.name}": []' for c in model.classes)
    w.put("__om_registry__ = {%s}" % regs)
    anc = ", ".join(
        '"%s": (%s)' % (c.name, "".join(f'"{a}", ' for a in model.ancestry(c.name)))
        for c in model.classes
    )
    w.put("__om_ancestors__ = {%s}" % anc)
    defaults = []
    for c in model.classes:
        pairs = ", ".join(
            f'"{a.name}": {_default_literal(a.type)}'
            for a in all_attributes(model, c.name)
        )
        defaults.append('"%s": {%s}' % (c.name, pairs))
    w.put("__om_defaults__ = {%s}" % ", ".join(defaults))
    rels = ", ".join(
        f'"{r.id}": ("{r.kind}", "{r.from_cls}", "{r.to_cls}")' for r in model.relations
    )
    w.put("__om_relations__ = {%s}" % rels)
    w.put()
    w.put()
    for line in _RUNTIME_HELPERS.splitlines():
        w.put(line)
    w.put()


def _default_literal(type_name: str) -> str:
    return {
        "Integer": "0",
        "Real": "0.0",
        "Boolean": "False",
        "String": '""',
    }.get(type_name, "None")


_RUNTIME_HELPERS = '''\
def __om_new__(obj, cls_name):
    obj.__om_id__ = __om_next_id__[0]
    __om_next_id__[0] += 1
    obj.__om_class__ = cls_name
    obj.__om_attrs__ = dict(__om_defaults__[cls_name])
    __om_heap__[obj.__om_id__] = obj
    for anc in __om_ancestors__[cls_name]:
        __om_registry__[anc].append(obj)


def __om_deref__(v):
    if v is None:
        raise __ModelError__("use of the none handle")
    if not isinstance(v, __OmBase__):
        raise __ModelError__("expected an instance")
    if v.__om_id__ not in __om_heap__:
        raise __ModelError__("instance %d has been deleted" % v.__om_id__)
    return v


def __om_getattr__(obj, name):
    o = __om_deref__(obj)
    if name not in o.__om_attrs__:
        raise __ModelError__("class %s has no attribute %s" % (o.__om_class__, name))
    return o.__om_attrs__[name]


def __om_setattr__(obj, name, value):
    o = __om_deref__(obj)
    if name not in o.__om_attrs__:
        raise __ModelError__("class %s has no attribute %s" % (o.__om_class__, name))
    o.__om_attrs__[name] = __om_chkval__(value)


def __om_chkval__(v):
    if v is __om_void__:
        raise __ModelError__("method returned no value")
    return v


def __om_div__(a, b):
    if b == 0:
        raise __ModelError__("division by zero")
    return a / b


def __om_empty__(v):
    if isinstance(v, list):
        return len(v) == 0
    if v is None:
        return True
    if isinstance(v, __OmBase__):
        return False
    raise __ModelError__("empty of a non-instance value")


def __om_kind_of__(cls_name, ancestor):
    return ancestor in __om_ancestors__[cls_name]


def __om_relate__(a, b, rel):
    ao = __om_deref__(a)
    bo = __om_deref__(b)
    if rel not in __om_relations__:
        raise __ModelError__("unknown relation " + rel)
    _, from_cls, to_cls = __om_relations__[rel]
    if not __om_kind_of__(ao.__om_class__, from_cls):
        raise __ModelError__("%s cannot play the %s end of %s" % (ao.__om_class__, from_cls, rel))
    if not __om_kind_of__(bo.__om_class__, to_cls):
        raise __ModelError__("%s cannot play the %s end of %s" % (bo.__om_class__, to_cls, rel))
    for la, lb in __om_links__[rel]:
        if la is ao and lb is bo:
            return
    __om_links__[rel].append((ao, bo))


def __om_unrelate__(a, b, rel):
    ao = __om_deref__(a)
    bo = __om_deref__(b)
    if rel not in __om_relations__:
        raise __ModelError__("unknown relation " + rel)
    for i, (la, lb) in enumerate(__om_links__[rel]):
        if la is ao and lb is bo:
            del __om_links__[rel][i]
            return


def __om_link_key__(item):
    rel, a, b = item
    return (int(rel[1:]), a.__om_id__, b.__om_id__)


def __om_delete__(v):
    __om_delete_cascade__(__om_deref__(v), False)


def __om_delete_cascade__(o, cascaded):
    touching = []
    for rel, pairs in __om_links__.items():
        for a, b in pairs:
            if a is o or b is o:
                touching.append((rel, a, b))
    touching.sort(key=__om_link_key__)
    parts = []
    for rel, a, b in touching:
        __om_links__[rel].remove((a, b))
        if __om_relations__[rel][0] == "composition" and a is o:
            parts.append(b)
    del __om_heap__[o.__om_id__]
    seen = set()
    for p in sorted(parts, key=lambda x: x.__om_id__):
        if p.__om_id__ in seen:
            continue
        seen.add(p.__om_id__)
        if p.__om_id__ in __om_heap__:
            __om_delete_cascade__(p, True)


def __om_select_any__(cls_name, pred):
    for o in __om_registry__[cls_name]:
        if o.__om_id__ in __om_heap__ and (pred is None or pred(o)):
            return o
    return None


def __om_select_many__(cls_name, pred):
    out = []
    for o in __om_registry__[cls_name]:
        if o.__om_id__ in __om_heap__ and (pred is None or pred(o)):
            out.append(o)
    return out


def __om_step_forward__(rel, cls_name):
    _, from_cls, to_cls = __om_relations__[rel]
    if cls_name == to_cls:
        return True
    if cls_name == from_cls:
        return False
    if __om_kind_of__(cls_name, to_cls) or __om_kind_of__(to_cls, cls_name):
        return True
    if __om_kind_of__(cls_name, from_cls) or __om_kind_of__(from_cls, cls_name):
        return False
    raise __ModelError__("relation %s does not reach class %s" % (rel, cls_name))


def __om_navigate__(start, steps, many):
    if isinstance(start, list):
        current = []
        for o in sorted(start, key=lambda x: x.__om_id__):
            current.append(__om_deref__(o))
    elif start is None or isinstance(start, __OmBase__):
        current = [__om_deref__(start)]
    else:
        raise __ModelError__("cannot navigate from a non-instance value")
    for cls_name, rel in steps:
        if rel not in __om_relations__:
            raise __ModelError__("unknown relation " + rel)
        forward = __om_step_forward__(rel, cls_name)
        ids = set(o.__om_id__ for o in current)
        found = {}
        for a, b in __om_links__[rel]:
            if forward and a.__om_id__ in ids:
                found[b.__om_id__] = b
            elif not forward and b.__om_id__ in ids:
                found[a.__om_id__] = a
        current = [found[i] for i in sorted(found)]
    if many:
        return current
    return current[0] if current else None


def __om_fail__(message):
    raise __ModelError__(message)


def __om_fail_unknown__(name):
    raise __ModelError__("unknown variable " + name)


def __om_fail_method__(target, name):
    raise __ModelError__("no method " + name)


def __om_no_self__():
    raise __ModelError__("self is not bound in a static method")


def __om_no_selected__():
    raise __ModelError__("'selected' is only available inside a where clause")


def __om_tag__(v):
    if v is __om_void__:
        return None
    if isinstance(v, bool):
        return {"t": "bool", "v": v}
    if isinstance(v, int):
        return {"t": "int", "v": v}
    if isinstance(v, float):
        return {"t": "real", "v": v}
    if isinstance(v, str):
        return {"t": "str", "v": v}
    if v is None:
        return {"t": "handle", "v": None}
    if isinstance(v, __OmBase__):
        return {"t": "handle", "v": v.__om_id__}
    if isinstance(v, list):
        return {"t": "set", "v": [o.__om_id__ for o in v]}
    raise __ModelError__("untaggable value")'''


def _emit_classes(
    w: _Writer,
    fused: FusedModel,
    class_map: Dict[str, str],
    method_map: Dict[str, str],
):
    model = fused.model
    parent = dict(model.generalizations)
    for name in topo_order_classes(model):
        cdef = model.class_named(name)
        if cdef is None:
            continue
        base = class_map.get(parent.get(name, ""), "__OmBase__")
        w.put()
        w.put(f"class {class_map[name]}({base}):")
        w.put(f"    def __init__(self):")
        w.put(f'        __om_new__(self, "{name}")')
        for meth in cdef.methods:
            w.put()
            _emit_method(w, fused, name, meth, method_map, class_map)
        if not cdef.methods:
            pass  # __init__ alone keeps the class body non-empty
    w.put()


def _emit_method(
    w: _Writer,
    fused: FusedModel,
    cls_name: str,
    meth: MethodDef,
    method_map: Dict[str, str],
    class_map: Dict[str, str],
):
    body = fused.bodies.get((cls_name, meth.name))
    emitter = _BodyEmitter(w, fused, cls_name, meth, method_map, class_map)
    emitter.emit(body)


class _BodyEmitter:
    """Translate one scripted method body into Python statements."""

    def __init__(self, w, fused, cls_name, meth, method_map, class_map):
        self.w = w
        self.fused = fused
        self.model = fused.model
        self.cls_name = cls_name
        self.meth = meth
        self.method_map = method_map
        self.class_map = class_map
        self.local_map: Dict[str, str] = {}
        self.in_where = 0

    def emit(self, body):
        meth = self.meth
        names = [n for n, _ in meth.params]
        if body is not None:
            names.extend(_assigned_locals(body.statements))
        # Locals must not capture emitted class names: assignment would make
        # the class name function-local and break `Cls()` references.
        taken: Set[str] = {"self", "__om_sel__"} | set(self.class_map.values())
        for n in names:
            if n not in self.local_map:
                emitted = sanitize_identifier(n, taken)
                self.local_map[n] = emitted
                taken.add(emitted)

        params = ", ".join(self.local_map[n] for n, _ in meth.params)
        pymeth = self.method_map[meth.name]
        if meth.is_static:
            self.w.put("    @staticmethod")
            self.w.put(f"    def {pymeth}({params}):")
        else:
            sig = f"self, {params}" if params else "self"
            self.w.put(f"    def {pymeth}({sig}):")
        if body is None or body.is_empty():
            self.w.put("        # no scripted body: generated as a no-op")
            self.w.put("        return __om_void__")
            return
        for stmt in body.statements:
            self._stmt(stmt, 2)
        self.w.put("        return __om_void__")

    # -- statements --------------------------------------------------------

    def _tag(self, stmt) -> str:
        return f"  # oal: {self.cls_name}.{self.meth.name}:{stmt.span.line}"

    def _stmt(self, stmt, indent: int):
        put = lambda line: self.w.put(line, indent)
        tag = self._tag(stmt)
        if isinstance(stmt, oal_ast.CreateStmt):
            if self.model.class_named(stmt.cls) is None:
                put(f'__om_fail_unknown__("{stmt.cls}"){tag}')
                return
            put(f"{self._local(stmt.var)} = {self.class_map[stmt.cls]}(){tag}")
        elif isinstance(stmt, oal_ast.DeleteStmt):
            put(f"__om_delete__({self._read_local(stmt.var)}){tag}")
        elif isinstance(stmt, oal_ast.AssignStmt):
            value = self._expr(stmt.expr)
            t = stmt.target
            if t.attr is None:
                put(f"{self._local(t.name)} = __om_chkval__({value}){tag}")
            else:
                recv = self._receiver_ref(t.name)
                put(f'__om_setattr__({recv}, "{t.attr}", {value}){tag}')
        elif isinstance(stmt, oal_ast.SelectInstStmt):
            if self.model.class_named(stmt.cls) is None:
                put(f'__om_fail_unknown__("{stmt.cls}"){tag}')
                return
            pred = "None"
            if stmt.where is not None:
                self.in_where += 1
                pred = f"(lambda __om_sel__: {self._expr(stmt.where)})"
                self.in_where -= 1
            fn = "__om_select_any__" if stmt.kind == "any" else "__om_select_many__"
            put(f'{self._local(stmt.var)} = {fn}("{stmt.cls}", {pred}){tag}')
        elif isinstance(stmt, oal_ast.SelectRelStmt):
            steps = ", ".join(f'("{cls}", "{rel}")' for cls, rel in stmt.steps)
            many = "True" if stmt.kind == "many" else "False"
            put(
                f"{self._local(stmt.var)} = __om_navigate__({self._read_local(stmt.start)}, [{steps}], {many}){tag}"
            )
        elif isinstance(stmt, oal_ast.RelateStmt):
            put(
                f'__om_relate__({self._read_local(stmt.a)}, {self._read_local(stmt.b)}, "{stmt.rel}"){tag}'
            )
        elif isinstance(stmt, oal_ast.UnrelateStmt):
            put(
                f'__om_unrelate__({self._read_local(stmt.a)}, {self._read_local(stmt.b)}, "{stmt.rel}"){tag}'
            )
        elif isinstance(stmt, oal_ast.IfStmt):
            for i, (cond, block) in enumerate(stmt.arms):
                kw = "if" if i == 0 else "elif"
                put(f"{kw} {self._expr(cond)}:{self._tag(stmt)}")
                self._block(block, indent + 1)
            if stmt.else_block is not None:
                put("else:")
                self._block(stmt.else_block, indent + 1)
        elif isinstance(stmt, oal_ast.WhileStmt):
            put(f"while {self._expr(stmt.cond)}:{tag}")
            self._block(stmt.body, indent + 1)
        elif isinstance(stmt, oal_ast.ForEachStmt):
            put(
                f"for {self._local(stmt.var)} in list({self._read_local(stmt.set_var)}):{tag}"
            )
            self._block(stmt.body, indent + 1)
        elif isinstance(stmt, oal_ast.ReturnStmt):
            if stmt.expr is None:
                put(f"return __om_void__{tag}")
            else:
                put(f"return __om_chkval__({self._expr(stmt.expr)}){tag}")
        elif isinstance(stmt, oal_ast.CallStmt):
            put(f"{self._call(stmt.call, as_stmt=True)}{tag}")
        else:
            raise AssertionError(f"unknown statement {stmt!r}")

    def _block(self, stmts, indent: int):
        if not stmts:
            self.w.put("pass", indent)
            return
        for s in stmts:
            self._stmt(s, indent)

    # -- expressions ---------------------------------------------------------

    def _local(self, name: str) -> str:
        return self.local_map[name]

    def _read_local(self, name: str) -> str:
        if name in self.local_map:
            return self.local_map[name]
        return f'__om_fail_unknown__("{name}")'

    def _receiver_ref(self, name: str) -> str:
        if name == "self":
            if self.meth.is_static:
                return "__om_no_self__()"
            return "self"
        return self._read_local(name)

    def _expr(self, expr) -> str:
        if isinstance(expr, oal_ast.IntLit):
            return repr(expr.value)
        if isinstance(expr, oal_ast.RealLit):
            return repr(expr.value)
        if isinstance(expr, oal_ast.StringLit):
            return repr(expr.value)
        if isinstance(expr, oal_ast.BoolLit):
            return "True" if expr.value else "False"
        if isinstance(expr, oal_ast.NoneLit):
            return "None"
        if isinstance(expr, oal_ast.SelfRef):
            return self._receiver_ref("self")
        if isinstance(expr, oal_ast.SelectedRef):
            if self.in_where:
                return "__om_sel__"
            return "__om_no_selected__()"
        if isinstance(expr, oal_ast.VarRef):
            return self._read_local(expr.name)
        if isinstance(expr, oal_ast.AttrAccess):
            return f'__om_getattr__({self._expr(expr.receiver)}, "{expr.attr}")'
        if isinstance(expr, oal_ast.CallExpr):
            return f"__om_chkval__({self._call(expr, as_stmt=False)})"
        if isinstance(expr, oal_ast.UnaryOp):
            operand = self._expr(expr.operand)
            if expr.op == "-":
                return f"(-{operand})"
            if expr.op == "not":
                return f"(not {operand})"
            if expr.op == "cardinality":
                return f"len({operand})"
            if expr.op == "empty":
                return f"__om_empty__({operand})"
            if expr.op == "not_empty":
                return f"(not __om_empty__({operand}))"
            raise AssertionError(expr.op)
        if isinstance(expr, oal_ast.BinaryOp):
            lhs, rhs = self._expr(expr.lhs), self._expr(expr.rhs)
            if expr.op == "/":
                return f"__om_div__({lhs}, {rhs})"
            return f"({lhs} {expr.op} {rhs})"
        raise AssertionError(f"unknown expression {expr!r}")

    def _call(self, call: oal_ast.CallExpr, as_stmt: bool) -> str:
        pymeth = self.method_map.get(call.method)
        recv = call.receiver
        if recv == "self":
            if self.meth.is_static:
                return "__om_no_self__()"
            target = "__om_deref__(self)"
        elif recv in self.local_map:
            target = f"__om_deref__({self.local_map[recv]})"
        elif self.model.class_named(recv) is not None:
            # Static receiver: resolution is decidable at generation time,
            # and failures must fire before argument evaluation.
            resolved = resolve_method(self.model, recv, call.method)
            if resolved is None:
                return f'__om_fail_method__(None, "{recv}.{call.method}")'
            _, mdef = resolved
            if not mdef.is_static:
                return (
                    f'__om_fail__("{recv}.{call.method} is an instance method; '
                    f'call it on an instance")'
                )
            target = self.class_map[recv]
        else:
            return f'__om_fail_unknown__("{recv}")'
        if pymeth is None:
            # No class declares this method name: fail after the receiver
            # dereference, before evaluating arguments.
            return f'__om_fail_method__({target}, "{call.method}")'
        args = ", ".join(self._expr(a) for a in call.args)
        return f"{target}.{pymeth}({args})"


def _assigned_locals(stmts) -> List[str]:
    """Names a body can bind, in first-appearance order."""
    out: List[str] = []

    def add(name: str):
        if name not in out:
            out.append(name)

    def visit(block):
        for s in block:
            if isinstance(s, oal_ast.CreateStmt):
                add(s.var)
            elif isinstance(s, oal_ast.AssignStmt) and s.target.attr is None:
                add(s.target.name)
            elif isinstance(s, (oal_ast.SelectInstStmt, oal_ast.SelectRelStmt)):
                add(s.var)
            elif isinstance(s, oal_ast.IfStmt):
                for _, b in s.arms:
                    visit(b)
                if s.else_block:
                    visit(s.else_block)
            elif isinstance(s, oal_ast.WhileStmt):
                visit(s.body)
            elif isinstance(s, oal_ast.ForEachStmt):
                add(s.var)
                visit(s.body)

    visit(stmts)
    return out


def _emit_dump(w: _Writer):
    w.put()
    for line in _DUMP_ROUTINE.splitlines():
        w.put(line)


_DUMP_ROUTINE = '''\
def __dump_state__():
    instances = []
    for ident in sorted(__om_heap__):
        o = __om_heap__[ident]
        attrs = {}
        for name in sorted(o.__om_attrs__):
            attrs[name] = __om_tag__(o.__om_attrs__[name])
        instances.append({"id": ident, "class": o.__om_class__, "attrs": attrs})
    links = []
    for rel in __om_links__:
        for a, b in __om_links__[rel]:
            links.append((rel, a, b))
    links.sort(key=__om_link_key__)
    doc = {
        "instances": instances,
        "links": [{"rel": rel, "a": a.__om_id__, "b": b.__om_id__} for rel, a, b in links],
        "status": __om_status__[0],
        "return_value": __om_tag__(__om_return__[0]),
    }
    print(json.dumps(doc, separators=(",", ":")))'''


def _emit_main(
    w: _Writer,
    class_map: Dict[str, str],
    method_map: Dict[str, str],
    entry_info,
):
    w.put()
    w.put()
    w.put("def __om_run__():")
    if entry_info is None:
        w.put("    __dump_state__()")
    else:
        cls_name, meth_name, mdef = entry_info
        w.put("    try:")
        if mdef.is_static:
            w.put(f"        __om_ret__ = {class_map[cls_name]}.{method_map[meth_name]}()")
        else:
            w.put(f"        __om_self__ = {class_map[cls_name]}()")
            w.put(f"        __om_ret__ = __om_self__.{method_map[meth_name]}()")
        w.put("        __om_return__[0] = __om_ret__")
        w.put("    except (__ModelError__, TypeError, AttributeError, UnboundLocalError):")
        w.put('        __om_status__[0] = "failed"')
        w.put("        __om_return__[0] = __om_void__")
        w.put("    __dump_state__()")
    w.put()
    w.put()
    w.put('if __name__ == "__main__":')
    w.put("    __om_run__()")
