"""AST node definitions for the action-language subset.

Every statement and expression node carries a :class:`SourceSpan` (1-based
line, 0-based columns).  Structural equality deliberately ignores spans so
parse/pretty-print round-trips compare cleanly: dataclass `eq` is disabled
for spans via `compare=False`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple


@dataclass(frozen=True)
class SourceSpan:
    line: int
    col_start: int
    col_end: int

    @staticmethod
    def merge(a: "SourceSpan", b: "SourceSpan") -> "SourceSpan":
        # Spans are line-local; a statement spilling over keeps its head line.
        if a.line == b.line:
            return SourceSpan(a.line, min(a.col_start, b.col_start), max(a.col_end, b.col_end))
        first = a if a.line < b.line else b
        return SourceSpan(first.line, first.col_start, first.col_end)


DUMMY_SPAN = SourceSpan(1, 0, 0)


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    span: SourceSpan

    def __str__(self) -> str:
        return f"{self.span.line}:{self.span.col_start}: {self.severity}: {self.message}"


def _span_field():
    return field(default=DUMMY_SPAN, compare=False, repr=False)


# --- Expressions ---------------------------------------------------------


@dataclass(frozen=True)
class Expr:
    pass


@dataclass(frozen=True)
class IntLit(Expr):
    value: int
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class RealLit(Expr):
    value: float
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class StringLit(Expr):
    value: str
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class BoolLit(Expr):
    value: bool
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class NoneLit(Expr):
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class VarRef(Expr):
    name: str
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class SelfRef(Expr):
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class SelectedRef(Expr):
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class AttrAccess(Expr):
    receiver: Expr
    attr: str
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class CallExpr(Expr):
    """Method invocation. Receiver is syntactically one name or `self`."""

    receiver: str  # identifier, class name, or the literal "self"
    method: str
    args: Tuple[Expr, ...] = ()
    span: SourceSpan = _span_field()


BINARY_OPS = ("+", "-", "*", "/", "==", "!=", "<", "<=", ">", ">=", "and", "or")
UNARY_OPS = ("-", "not", "cardinality", "empty", "not_empty")


@dataclass(frozen=True)
class BinaryOp(Expr):
    op: str
    lhs: Expr
    rhs: Expr
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class UnaryOp(Expr):
    op: str
    operand: Expr
    span: SourceSpan = _span_field()


# --- Statements ----------------------------------------------------------


@dataclass(frozen=True)
class Stmt:
    pass


@dataclass(frozen=True)
class CreateStmt(Stmt):
    var: str
    cls: str
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class DeleteStmt(Stmt):
    var: str
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class LValue:
    """Assignment target: a variable, or single-level `receiver.attr`."""

    name: str  # variable name, or receiver name ("self" allowed) when attr set
    attr: Optional[str] = None
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class AssignStmt(Stmt):
    target: LValue
    expr: Expr
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class SelectInstStmt(Stmt):
    kind: str  # "any" | "many"
    var: str
    cls: str
    where: Optional[Expr] = None
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class SelectRelStmt(Stmt):
    kind: str  # "one" | "any" | "many"
    var: str
    start: str
    steps: Tuple[Tuple[str, str], ...] = ()  # (class, relation-id)
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class RelateStmt(Stmt):
    a: str
    b: str
    rel: str
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class UnrelateStmt(Stmt):
    a: str
    b: str
    rel: str
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class IfStmt(Stmt):
    arms: Tuple[Tuple[Expr, Tuple[Stmt, ...]], ...]
    else_block: Optional[Tuple[Stmt, ...]] = None
    span: SourceSpan = _span_field()  # span of the `if (...)` header
    arm_spans: Tuple[SourceSpan, ...] = field(default=(), compare=False, repr=False)


@dataclass(frozen=True)
class WhileStmt(Stmt):
    cond: Expr
    body: Tuple[Stmt, ...] = ()
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class ForEachStmt(Stmt):
    var: str
    set_var: str
    body: Tuple[Stmt, ...] = ()
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class ReturnStmt(Stmt):
    expr: Optional[Expr] = None
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class CallStmt(Stmt):
    call: CallExpr
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class MethodAst:
    statements: Tuple[Stmt, ...] = ()

    def is_empty(self) -> bool:
        return not self.statements


def walk_statements(stmts) -> List[Stmt]:
    """All statements in execution-tree order, including nested blocks."""
    out: List[Stmt] = []
    for s in stmts:
        out.append(s)
        if isinstance(s, IfStmt):
            for _, block in s.arms:
                out.extend(walk_statements(block))
            if s.else_block:
                out.extend(walk_statements(s.else_block))
        elif isinstance(s, (WhileStmt, ForEachStmt)):
            out.extend(walk_statements(s.body))
    return out
