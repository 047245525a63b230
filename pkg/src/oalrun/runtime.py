"""Tree-walking, steppable interpreter over a fused model.

Execution is organized as a trampoline: every model-level call frame runs
as its own Python generator, and an explicit stack of generators replaces
nested delegation, so model call depth never consumes interpreter C
stack.  Generators yield two signals upward:

* ``_STEP`` — a pause point immediately before a command executes.  One
  :func:`step_command` resumes from the previous pause, executes exactly
  one command (emitting its `command` event plus whatever state changes it
  causes) and stops at the next pause.
* ``_CallFrame`` — a method invocation; the driver pushes the callee's
  generator and later feeds the return value back into the caller.

All state changes are emitted as trace events in the order they happen,
which keeps the event stream and the heap in lockstep: replaying the
emitted prefix always reproduces the current snapshot.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from .ingest import FusedModel
from .model import all_attributes, resolve_method
from .oal import ast as oal_ast
from .snapshot import Snapshot, SnapshotInstance, link_sort_key
from .trace import TraceEvent, make_event
from .values import (
    VOID,
    Handle,
    InstanceSet,
    NULL_HANDLE,
    Value,
    default_for_type,
    to_tagged,
    type_name_of,
)

MAX_CALL_DEPTH = 1024
DEFAULT_STEP_BUDGET = 1_000_000

# Runtime failure kinds.
STALE_HANDLE = "stale-handle"
NONE_DEREFERENCE = "none-dereference"
TYPE_MISMATCH = "type-mismatch"
DIVISION_BY_ZERO = "division-by-zero"
UNKNOWN_METHOD = "unknown-method"
UNKNOWN_NAME = "unknown-name"
ARITY_MISMATCH = "arity-mismatch"
CALL_DEPTH_EXCEEDED = "call-depth-exceeded"
STEP_BUDGET_EXHAUSTED = "step-budget-exhausted"


class ModelRuntimeError(Exception):
    """A failure raised by the modeled program (not by this interpreter)."""

    def __init__(self, kind: str, message: str, line: int = 0):
        super().__init__(message)
        self.kind = kind
        self.line = line


class StartError(Exception):
    """start_session rejection; `kind` mirrors the runtime error taxonomy."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


@dataclass
class Frame:
    cls: str  # owning class of the executing body
    method: str
    self_id: Optional[int]
    locals: Dict[str, Value] = field(default_factory=dict)
    selected_id: Optional[int] = None  # bound inside where-clauses
    current_line: int = 0


@dataclass
class ObjectInstance:
    id: int
    cls: str
    attrs: Dict[str, Value] = field(default_factory=dict)


@dataclass
class StepOutcome:
    kind: str  # "progressed" | "finished" | "failed"
    value: Value = VOID
    error: Optional[ModelRuntimeError] = None


class _Step:
    __slots__ = ()


_STEP = _Step()


class _CallFrame:
    __slots__ = ("gen",)

    def __init__(self, gen):
        self.gen = gen


class _Returned:
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value


_NORMAL = object()


class ExecSession:
    """One stepped execution of a fused model from a chosen entry method."""

    def __init__(
        self,
        fused: FusedModel,
        step_budget: int = DEFAULT_STEP_BUDGET,
        on_event: Optional[Callable[[TraceEvent], None]] = None,
    ):
        self.fused = fused
        self.heap: Dict[int, ObjectInstance] = {}
        self.links: List[Tuple[str, int, int]] = []
        self.call_stack: List[Frame] = []
        self.status = "ready"
        self.step_budget = step_budget
        self.steps_used = 0
        self.next_id = 1
        self.seq = 0
        self.events: List[TraceEvent] = []
        self.return_value: Value = VOID
        self.on_event = on_event
        self._gen_stack: list = []
        self._pending = None

    # -- events ------------------------------------------------------------

    def emit(self, type_: str, **payload) -> TraceEvent:
        self.seq += 1
        event = make_event(self.seq, type_, **payload)
        self.events.append(event)
        if self.on_event is not None:
            self.on_event(event)
        return event

    # -- heap --------------------------------------------------------------

    def create_instance(self, cls: str) -> int:
        ident = self.next_id
        self.next_id += 1
        attrs = {
            a.name: default_for_type(a.type)
            for a in all_attributes(self.fused.model, cls)
        }
        self.heap[ident] = ObjectInstance(ident, cls, attrs)
        self.emit("instance_created", **{"class": cls, "id": ident})
        return ident

    def snapshot(self) -> Snapshot:
        return Snapshot(
            instances=[
                SnapshotInstance(inst.id, inst.cls, dict(inst.attrs))
                for inst in self.heap.values()
            ],
            links=list(self.links),
            status=self.status,
            return_value=self.return_value if self.status == "finished" else VOID,
        )


def start_session(
    fused: FusedModel,
    entry: Tuple[str, str],
    args: Optional[List[Value]] = None,
    step_budget: int = DEFAULT_STEP_BUDGET,
    on_event: Optional[Callable[[TraceEvent], None]] = None,
) -> ExecSession:
    """Prepare a session: validate the entry, create the receiver, open the
    entry call.  The first command runs on the first step_command call.

    A non-static entry auto-instantiates its class to serve as `self`; a
    method with no bound commands is rejected (an animation must have at
    least one command to execute).
    """
    args = list(args or [])
    cls_name, meth_name = entry
    if fused.model.class_named(cls_name) is None:
        raise StartError("unknown-entry", f"unknown class {cls_name}")
    resolved = resolve_method(fused.model, cls_name, meth_name)
    if resolved is None:
        raise StartError("unknown-entry", f"unknown method {cls_name}.{meth_name}")
    owner, mdef = resolved
    body = fused.bodies.get((owner, meth_name))
    if body is None or body.is_empty():
        raise StartError(
            "empty-body-entry",
            f"method {cls_name}.{meth_name} cannot start an execution: "
            "an entry method must have at least one command in it",
        )
    if len(args) != len(mdef.params):
        raise StartError(
            ARITY_MISMATCH,
            f"{cls_name}.{meth_name} takes {len(mdef.params)} argument(s), got {len(args)}",
        )

    session = ExecSession(fused, step_budget=step_budget, on_event=on_event)
    session.emit(
        "run_started",
        args=[to_tagged(a) for a in args],
        entry=f"{cls_name}.{meth_name}",
    )
    self_id: Optional[int] = None
    if not mdef.is_static:
        self_id = session.create_instance(cls_name)
    session.emit(
        "method_call",
        callee_id=self_id,
        caller_id=None,
        **{"class": owner},
        method=meth_name,
        static=mdef.is_static,
    )
    frame = Frame(owner, meth_name, self_id, dict(zip((p for p, _ in mdef.params), args)))
    session.call_stack.append(frame)

    interp = _Interpreter(session)
    root = interp.run_frame(frame, body.statements, is_entry=True)
    session._gen_stack = [root]
    session._pending = None
    _drive(session, prime=True)
    return session


def step_command(session: ExecSession) -> StepOutcome:
    """Execute exactly one command and emit its events.

    Loop and branch headers count as one command per evaluation.  A method
    invocation opens a new frame whose commands are themselves stepped.
    """
    if session.status not in ("ready", "running", "paused"):
        raise ValueError(f"cannot step a session in status {session.status!r}")
    session.status = "running"
    try:
        done = _drive(session, prime=False)
    except ModelRuntimeError as err:
        session.status = "failed"
        session.emit("error", kind=err.kind, line=err.line, message=str(err))
        return StepOutcome("failed", error=err)
    if done:
        session.status = "finished"
        session.emit("run_finished", status="finished")
        return StepOutcome("finished", value=session.return_value)
    return StepOutcome("progressed")


def run_to_completion(session: ExecSession) -> Snapshot:
    """Step until the run finishes or fails; returns the final snapshot."""
    while session.status in ("ready", "running", "paused"):
        outcome = step_command(session)
        if outcome.kind != "progressed":
            break
    return session.snapshot()


def _drive(session: ExecSession, prime: bool) -> bool:
    """Resume the generator stack until the next pause point.

    Returns True when the root frame has completed.  With prime=True this
    only advances to the first pause without executing anything.
    """
    stack = session._gen_stack
    send_value = session._pending
    session._pending = None
    while stack:
        top = stack[-1]
        try:
            signal = top.send(send_value)
        except StopIteration as stop:
            stack.pop()
            send_value = getattr(stop, "value", None)
            continue
        if signal is _STEP:
            return False
        if isinstance(signal, _CallFrame):
            stack.append(signal.gen)
            send_value = None
            continue
        raise AssertionError(f"unexpected interpreter signal {signal!r}")
    return True


class _Interpreter:
    def __init__(self, session: ExecSession):
        self.session = session
        self.model = session.fused.model

    # -- frame execution ----------------------------------------------------

    def run_frame(self, frame: Frame, stmts, is_entry: bool = False):
        result = yield from self._exec_block(frame, stmts)
        value = result.value if isinstance(result, _Returned) else VOID
        self.session.call_stack.pop()
        self.session.emit("method_return", value=to_tagged(value))
        if is_entry:
            self.session.return_value = value
        return value

    def _exec_block(self, frame: Frame, stmts):
        for stmt in stmts:
            result = yield from self._exec_stmt(frame, stmt)
            if result is not _NORMAL:
                return result
        return _NORMAL

    def _boundary(self, frame: Frame, span: oal_ast.SourceSpan):
        yield _STEP
        if self.session.steps_used >= self.session.step_budget:
            raise ModelRuntimeError(
                STEP_BUDGET_EXHAUSTED,
                f"step budget of {self.session.step_budget} commands exhausted",
                span.line,
            )
        self.session.steps_used += 1
        frame.current_line = span.line
        self.session.emit(
            "command",
            **{"class": frame.cls},
            col_end=span.col_end,
            col_start=span.col_start,
            line=span.line,
            method=frame.method,
        )

    def _exec_stmt(self, frame: Frame, stmt):
        if isinstance(stmt, oal_ast.IfStmt):
            return (yield from self._exec_if(frame, stmt))
        if isinstance(stmt, oal_ast.WhileStmt):
            return (yield from self._exec_while(frame, stmt))
        if isinstance(stmt, oal_ast.ForEachStmt):
            return (yield from self._exec_foreach(frame, stmt))

        yield from self._boundary(frame, stmt.span)
        line = stmt.span.line

        if isinstance(stmt, oal_ast.CreateStmt):
            if self.model.class_named(stmt.cls) is None:
                raise ModelRuntimeError(UNKNOWN_NAME, f"unknown class {stmt.cls}", line)
            ident = self.session.create_instance(stmt.cls)
            frame.locals[stmt.var] = Handle(ident)
            return _NORMAL

        if isinstance(stmt, oal_ast.DeleteStmt):
            handle = self._lookup(frame, stmt.var, line)
            inst = self._deref(handle, line)
            self._delete_cascade(inst.id, cascaded=False)
            return _NORMAL

        if isinstance(stmt, oal_ast.AssignStmt):
            value = yield from self._eval(frame, stmt.expr)
            self._check_usable(value, line)
            target = stmt.target
            if target.attr is None:
                frame.locals[target.name] = value
            else:
                if target.name == "self":
                    receiver = self._self_handle(frame, line)
                else:
                    receiver = self._lookup(frame, target.name, line)
                inst = self._deref(receiver, line)
                if target.attr not in inst.attrs:
                    raise ModelRuntimeError(
                        UNKNOWN_NAME,
                        f"class {inst.cls} has no attribute {target.attr}",
                        line,
                    )
                inst.attrs[target.attr] = value
                self.session.emit(
                    "attribute_set", attr=target.attr, id=inst.id, value=to_tagged(value)
                )
            return _NORMAL

        if isinstance(stmt, oal_ast.SelectInstStmt):
            result = yield from self._exec_select_inst(frame, stmt)
            frame.locals[stmt.var] = result
            return _NORMAL

        if isinstance(stmt, oal_ast.SelectRelStmt):
            frame.locals[stmt.var] = self._navigate(frame, stmt)
            return _NORMAL

        if isinstance(stmt, oal_ast.RelateStmt):
            self._relate(frame, stmt, line)
            return _NORMAL

        if isinstance(stmt, oal_ast.UnrelateStmt):
            self._unrelate(frame, stmt, line)
            return _NORMAL

        if isinstance(stmt, oal_ast.ReturnStmt):
            if stmt.expr is None:
                return _Returned(VOID)
            value = yield from self._eval(frame, stmt.expr)
            self._check_usable(value, line)
            return _Returned(value)

        if isinstance(stmt, oal_ast.CallStmt):
            yield from self._eval_call(frame, stmt.call)  # value discarded
            return _NORMAL

        raise AssertionError(f"unknown statement {stmt!r}")

    def _exec_if(self, frame: Frame, stmt: oal_ast.IfStmt):
        for idx, (cond, block) in enumerate(stmt.arms):
            span = stmt.arm_spans[idx] if idx < len(stmt.arm_spans) else stmt.span
            yield from self._boundary(frame, span)
            value = yield from self._eval(frame, cond)
            self._check_bool(value, span.line)
            if value:
                return (yield from self._exec_block(frame, block))
        if stmt.else_block is not None:
            return (yield from self._exec_block(frame, stmt.else_block))
        return _NORMAL

    def _exec_while(self, frame: Frame, stmt: oal_ast.WhileStmt):
        while True:
            yield from self._boundary(frame, stmt.span)
            value = yield from self._eval(frame, stmt.cond)
            self._check_bool(value, stmt.span.line)
            if not value:
                return _NORMAL
            result = yield from self._exec_block(frame, stmt.body)
            if result is not _NORMAL:
                return result

    def _exec_foreach(self, frame: Frame, stmt: oal_ast.ForEachStmt):
        yield from self._boundary(frame, stmt.span)
        line = stmt.span.line
        source = self._lookup(frame, stmt.set_var, line)
        if not isinstance(source, InstanceSet):
            raise ModelRuntimeError(
                TYPE_MISMATCH,
                f"for each iterates an instance set, not {type_name_of(source)}",
                line,
            )
        for ident in source.ids:  # snapshot taken at loop entry
            frame.locals[stmt.var] = Handle(ident)
            result = yield from self._exec_block(frame, stmt.body)
            if result is not _NORMAL:
                return result
        return _NORMAL

    # -- selection and links --------------------------------------------------

    def _exec_select_inst(self, frame: Frame, stmt: oal_ast.SelectInstStmt):
        line = stmt.span.line
        if self.model.class_named(stmt.cls) is None:
            raise ModelRuntimeError(UNKNOWN_NAME, f"unknown class {stmt.cls}", line)
        matches: List[int] = []
        for ident in sorted(self.session.heap):
            inst = self.session.heap[ident]
            if not self.model.is_kind_of(inst.cls, stmt.cls):
                continue
            if stmt.where is not None:
                previous = frame.selected_id
                frame.selected_id = ident
                try:
                    verdict = yield from self._eval(frame, stmt.where)
                finally:
                    frame.selected_id = previous
                self._check_bool(verdict, line)
                if not verdict:
                    continue
            if stmt.kind == "any":
                return Handle(ident)
            matches.append(ident)
        if stmt.kind == "any":
            return NULL_HANDLE
        return InstanceSet(matches)

    def _navigate(self, frame: Frame, stmt: oal_ast.SelectRelStmt) -> Value:
        line = stmt.span.line
        start = self._lookup(frame, stmt.start, line)
        if isinstance(start, Handle):
            inst = self._deref(start, line)
            current = [inst.id]
        elif isinstance(start, InstanceSet):
            for ident in start.ids:
                if ident not in self.session.heap:
                    raise ModelRuntimeError(
                        STALE_HANDLE, f"instance {ident} has been deleted", line
                    )
            current = list(start.ids)
        else:
            raise ModelRuntimeError(
                TYPE_MISMATCH,
                f"cannot navigate from {type_name_of(start)}",
                line,
            )
        for cls, rel in stmt.steps:
            rdef = self.model.relation_by_id(rel)
            if rdef is None:
                raise ModelRuntimeError(UNKNOWN_NAME, f"unknown relation {rel}", line)
            forward = self._step_forward(rdef, cls, line)
            found = set()
            pool = set(current)
            for lrel, a, b in self.session.links:
                if lrel != rel:
                    continue
                if forward and a in pool:
                    found.add(b)
                elif not forward and b in pool:
                    found.add(a)
            current = sorted(found)
        if stmt.kind == "many":
            return InstanceSet(current)
        return Handle(current[0]) if current else NULL_HANDLE

    def _step_forward(self, rdef, cls: str, line: int) -> bool:
        if cls == rdef.to_cls:
            return True
        if cls == rdef.from_cls:
            return False
        if self.model.is_kind_of(cls, rdef.to_cls) or self.model.is_kind_of(rdef.to_cls, cls):
            return True
        if self.model.is_kind_of(cls, rdef.from_cls) or self.model.is_kind_of(rdef.from_cls, cls):
            return False
        raise ModelRuntimeError(
            TYPE_MISMATCH, f"relation {rdef.id} does not reach class {cls}", line
        )

    def _relate(self, frame: Frame, stmt: oal_ast.RelateStmt, line: int):
        a = self._deref(self._lookup(frame, stmt.a, line), line)
        b = self._deref(self._lookup(frame, stmt.b, line), line)
        rdef = self.model.relation_by_id(stmt.rel)
        if rdef is None:
            raise ModelRuntimeError(UNKNOWN_NAME, f"unknown relation {stmt.rel}", line)
        if not self.model.is_kind_of(a.cls, rdef.from_cls):
            raise ModelRuntimeError(
                TYPE_MISMATCH,
                f"{a.cls} cannot play the {rdef.from_cls} end of {rdef.id}",
                line,
            )
        if not self.model.is_kind_of(b.cls, rdef.to_cls):
            raise ModelRuntimeError(
                TYPE_MISMATCH,
                f"{b.cls} cannot play the {rdef.to_cls} end of {rdef.id}",
                line,
            )
        triple = (stmt.rel, a.id, b.id)
        if triple in self.session.links:
            return  # relating twice is a no-op
        self.session.links.append(triple)
        warn = self._multiplicity_exceeded(rdef, a.id, b.id)
        self.session.emit(
            "link_created", a=a.id, b=b.id, multiplicity_warning=warn, rel=stmt.rel
        )

    def _multiplicity_exceeded(self, rdef, a: int, b: int) -> bool:
        def bound(mult: str) -> Optional[int]:
            return 1 if mult in ("1", "0..1") else None

        to_bound = bound(rdef.to_mult)
        from_bound = bound(rdef.from_mult)
        if to_bound is not None:
            partners = sum(
                1 for rel, la, _ in self.session.links if rel == rdef.id and la == a
            )
            if partners > to_bound:
                return True
        if from_bound is not None:
            partners = sum(
                1 for rel, _, lb in self.session.links if rel == rdef.id and lb == b
            )
            if partners > from_bound:
                return True
        return False

    def _unrelate(self, frame: Frame, stmt: oal_ast.UnrelateStmt, line: int):
        a = self._deref(self._lookup(frame, stmt.a, line), line)
        b = self._deref(self._lookup(frame, stmt.b, line), line)
        if self.model.relation_by_id(stmt.rel) is None:
            raise ModelRuntimeError(UNKNOWN_NAME, f"unknown relation {stmt.rel}", line)
        triple = (stmt.rel, a.id, b.id)
        if triple in self.session.links:
            self.session.links.remove(triple)
            self.session.emit("link_removed", a=a.id, b=b.id, rel=stmt.rel)

    def _delete_cascade(self, ident: int, cascaded: bool):
        touching = sorted(
            (l for l in self.session.links if l[1] == ident or l[2] == ident),
            key=link_sort_key,
        )
        parts: List[int] = []
        for rel, a, b in touching:
            self.session.links.remove((rel, a, b))
            self.session.emit("link_removed", a=a, b=b, rel=rel)
            rdef = self.model.relation_by_id(rel)
            if rdef is not None and rdef.kind == "composition" and a == ident:
                parts.append(b)
        del self.session.heap[ident]
        self.session.emit("instance_deleted", cascaded=cascaded, id=ident)
        for part in sorted(set(parts)):
            if part in self.session.heap:
                self._delete_cascade(part, cascaded=True)

    # -- expressions ---------------------------------------------------------

    def _eval(self, frame: Frame, expr):
        line = expr.span.line
        if isinstance(expr, oal_ast.IntLit):
            return expr.value
        if isinstance(expr, oal_ast.RealLit):
            return expr.value
        if isinstance(expr, oal_ast.StringLit):
            return expr.value
        if isinstance(expr, oal_ast.BoolLit):
            return expr.value
        if isinstance(expr, oal_ast.NoneLit):
            return NULL_HANDLE
        if isinstance(expr, oal_ast.SelfRef):
            return self._self_handle(frame, line)
        if isinstance(expr, oal_ast.SelectedRef):
            if frame.selected_id is None:
                raise ModelRuntimeError(
                    UNKNOWN_NAME, "'selected' is only available inside a where clause", line
                )
            return Handle(frame.selected_id)
        if isinstance(expr, oal_ast.VarRef):
            return self._lookup(frame, expr.name, line)
        if isinstance(expr, oal_ast.AttrAccess):
            receiver = yield from self._eval(frame, expr.receiver)
            if not isinstance(receiver, Handle):
                raise ModelRuntimeError(
                    TYPE_MISMATCH,
                    f"attribute access on {type_name_of(receiver)}",
                    line,
                )
            inst = self._deref(receiver, line)
            if expr.attr not in inst.attrs:
                raise ModelRuntimeError(
                    UNKNOWN_NAME, f"class {inst.cls} has no attribute {expr.attr}", line
                )
            return inst.attrs[expr.attr]
        if isinstance(expr, oal_ast.CallExpr):
            value = yield from self._eval_call(frame, expr)
            if value is VOID:
                raise ModelRuntimeError(
                    TYPE_MISMATCH,
                    f"{expr.receiver}.{expr.method}() returned no value",
                    line,
                )
            return value
        if isinstance(expr, oal_ast.UnaryOp):
            return (yield from self._eval_unary(frame, expr))
        if isinstance(expr, oal_ast.BinaryOp):
            return (yield from self._eval_binary(frame, expr))
        raise AssertionError(f"unknown expression {expr!r}")

    def _eval_unary(self, frame: Frame, expr: oal_ast.UnaryOp):
        line = expr.span.line
        value = yield from self._eval(frame, expr.operand)
        op = expr.op
        if op == "-":
            if not _numeric(value):
                raise ModelRuntimeError(
                    TYPE_MISMATCH, f"cannot negate {type_name_of(value)}", line
                )
            return -value
        if op == "not":
            self._check_bool(value, line)
            return not value
        if op == "cardinality":
            if not isinstance(value, InstanceSet):
                raise ModelRuntimeError(
                    TYPE_MISMATCH, f"cardinality of {type_name_of(value)}", line
                )
            return len(value)
        if op in ("empty", "not_empty"):
            if isinstance(value, Handle):
                result = value.is_null()
            elif isinstance(value, InstanceSet):
                result = len(value) == 0
            else:
                raise ModelRuntimeError(
                    TYPE_MISMATCH, f"{op} of {type_name_of(value)}", line
                )
            return result if op == "empty" else not result
        raise AssertionError(f"unknown unary op {op}")

    def _eval_binary(self, frame: Frame, expr: oal_ast.BinaryOp):
        line = expr.span.line
        op = expr.op
        if op in ("and", "or"):
            lhs = yield from self._eval(frame, expr.lhs)
            self._check_bool(lhs, line)
            if op == "and" and not lhs:
                return False
            if op == "or" and lhs:
                return True
            rhs = yield from self._eval(frame, expr.rhs)
            self._check_bool(rhs, line)
            return rhs

        lhs = yield from self._eval(frame, expr.lhs)
        rhs = yield from self._eval(frame, expr.rhs)

        if op == "+":
            if isinstance(lhs, str) and isinstance(rhs, str):
                return lhs + rhs
            if _numeric(lhs) and _numeric(rhs):
                return lhs + rhs
            raise self._type_error(op, lhs, rhs, line)
        if op in ("-", "*"):
            if _numeric(lhs) and _numeric(rhs):
                return lhs - rhs if op == "-" else lhs * rhs
            raise self._type_error(op, lhs, rhs, line)
        if op == "/":
            if _numeric(lhs) and _numeric(rhs):
                if rhs == 0:
                    raise ModelRuntimeError(DIVISION_BY_ZERO, "division by zero", line)
                return lhs / rhs  # always Real
            raise self._type_error(op, lhs, rhs, line)
        if op in ("<", "<=", ">", ">="):
            ok = (_numeric(lhs) and _numeric(rhs)) or (
                isinstance(lhs, str) and isinstance(rhs, str)
            )
            if not ok:
                raise self._type_error(op, lhs, rhs, line)
            if op == "<":
                return lhs < rhs
            if op == "<=":
                return lhs <= rhs
            if op == ">":
                return lhs > rhs
            return lhs >= rhs
        if op in ("==", "!="):
            equal = self._equal(lhs, rhs, line)
            return equal if op == "==" else not equal
        raise AssertionError(f"unknown binary op {op}")

    def _equal(self, lhs, rhs, line) -> bool:
        if _numeric(lhs) and _numeric(rhs):
            return lhs == rhs
        if isinstance(lhs, str) and isinstance(rhs, str):
            return lhs == rhs
        if isinstance(lhs, bool) and isinstance(rhs, bool):
            return lhs == rhs
        if isinstance(lhs, Handle) and isinstance(rhs, Handle):
            return lhs.id == rhs.id
        if isinstance(lhs, InstanceSet) and isinstance(rhs, InstanceSet):
            return lhs.ids == rhs.ids
        raise self._type_error("==", lhs, rhs, line)

    def _type_error(self, op, lhs, rhs, line) -> ModelRuntimeError:
        return ModelRuntimeError(
            TYPE_MISMATCH,
            f"unsupported operand types for {op}: {type_name_of(lhs)} and {type_name_of(rhs)}",
            line,
        )

    # -- calls -----------------------------------------------------------------

    def _eval_call(self, frame: Frame, call: oal_ast.CallExpr):
        line = call.span.line
        receiver = call.receiver
        if receiver == "self":
            handle = self._self_handle(frame, line)
            return (yield from self._call_on_instance(frame, handle, call))
        if receiver in frame.locals:
            value = frame.locals[receiver]
            if not isinstance(value, Handle):
                raise ModelRuntimeError(
                    TYPE_MISMATCH,
                    f"cannot call a method on {type_name_of(value)}",
                    line,
                )
            return (yield from self._call_on_instance(frame, value, call))
        if self.model.class_named(receiver) is not None:
            resolved = resolve_method(self.model, receiver, call.method)
            if resolved is None:
                raise ModelRuntimeError(
                    UNKNOWN_METHOD, f"class {receiver} has no method {call.method}", line
                )
            owner, mdef = resolved
            if not mdef.is_static:
                raise ModelRuntimeError(
                    TYPE_MISMATCH,
                    f"{receiver}.{call.method} is an instance method; call it on an instance",
                    line,
                )
            args = yield from self._eval_args(frame, call)
            self._check_arity(mdef, args, call, line)
            return (yield from self._invoke(frame, owner, mdef, None, args))
        raise ModelRuntimeError(UNKNOWN_NAME, f"unknown name {receiver}", line)

    def _call_on_instance(self, frame: Frame, handle: Handle, call: oal_ast.CallExpr):
        line = call.span.line
        inst = self._deref(handle, line)
        resolved = resolve_method(self.model, inst.cls, call.method)
        if resolved is None:
            raise ModelRuntimeError(
                UNKNOWN_METHOD, f"class {inst.cls} has no method {call.method}", line
            )
        owner, mdef = resolved
        args = yield from self._eval_args(frame, call)
        self._check_arity(mdef, args, call, line)
        self_id = None if mdef.is_static else inst.id
        return (yield from self._invoke(frame, owner, mdef, self_id, args))

    def _eval_args(self, frame: Frame, call: oal_ast.CallExpr):
        args = []
        for arg in call.args:
            value = yield from self._eval(frame, arg)
            self._check_usable(value, arg.span.line)
            args.append(value)
        return args

    def _check_arity(self, mdef, args, call, line):
        if len(args) != len(mdef.params):
            raise ModelRuntimeError(
                ARITY_MISMATCH,
                f"{call.receiver}.{call.method} takes {len(mdef.params)} argument(s), got {len(args)}",
                line,
            )

    def _invoke(self, caller: Frame, owner: str, mdef, self_id: Optional[int], args):
        if len(self.session.call_stack) >= MAX_CALL_DEPTH:
            raise ModelRuntimeError(
                CALL_DEPTH_EXCEEDED,
                f"call depth exceeded {MAX_CALL_DEPTH}",
                caller.current_line,
            )
        self.session.emit(
            "method_call",
            callee_id=self_id,
            caller_id=caller.self_id,
            **{"class": owner},
            method=mdef.name,
            static=mdef.is_static,
        )
        body = self.session.fused.bodies.get((owner, mdef.name))
        if body is None or body.is_empty():
            # Declared but not scripted: a no-op that returns nothing.
            self.session.emit("method_return", value=None)
            return VOID
        frame = Frame(owner, mdef.name, self_id, dict(zip((p for p, _ in mdef.params), args)))
        self.session.call_stack.append(frame)
        value = yield _CallFrame(self.run_frame(frame, body.statements))
        return value

    # -- helpers -----------------------------------------------------------------

    def _self_handle(self, frame: Frame, line: int) -> Handle:
        if frame.self_id is None:
            raise ModelRuntimeError(
                NONE_DEREFERENCE, "self is not bound in a static method", line
            )
        return Handle(frame.self_id)

    def _lookup(self, frame: Frame, name: str, line: int) -> Value:
        if name in frame.locals:
            return frame.locals[name]
        raise ModelRuntimeError(UNKNOWN_NAME, f"unknown variable {name}", line)

    def _deref(self, value: Value, line: int) -> ObjectInstance:
        if not isinstance(value, Handle):
            raise ModelRuntimeError(
                TYPE_MISMATCH, f"expected an instance, got {type_name_of(value)}", line
            )
        if value.id is None:
            raise ModelRuntimeError(NONE_DEREFERENCE, "use of the none handle", line)
        inst = self.session.heap.get(value.id)
        if inst is None:
            raise ModelRuntimeError(
                STALE_HANDLE, f"instance {value.id} has been deleted", line
            )
        return inst

    def _check_bool(self, value, line):
        if not isinstance(value, bool):
            raise ModelRuntimeError(
                TYPE_MISMATCH, f"expected Boolean, got {type_name_of(value)}", line
            )

    def _check_usable(self, value, line):
        if value is VOID:
            raise ModelRuntimeError(
                TYPE_MISMATCH, "method returned no value", line
            )


def _numeric(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)
