"""Canonical formatter for parsed method bodies.

One statement per line, 4-space block indent, single spaces around binary
operators, parentheses only where precedence requires them.  The output
reparses to a structurally identical AST (spans aside), which the test
suite holds as a fixed point: parse(print(parse(s))) == parse(s).
"""

from __future__ import annotations

from decimal import Decimal
from typing import List

from .ast import (
    AssignStmt,
    AttrAccess,
    BinaryOp,
    BoolLit,
    CallExpr,
    CallStmt,
    CreateStmt,
    DeleteStmt,
    Expr,
    ForEachStmt,
    IfStmt,
    IntLit,
    MethodAst,
    NoneLit,
    RealLit,
    RelateStmt,
    ReturnStmt,
    SelectInstStmt,
    SelectRelStmt,
    SelectedRef,
    SelfRef,
    Stmt,
    StringLit,
    UnaryOp,
    UnrelateStmt,
    VarRef,
    WhileStmt,
)

_PREC_OR = 1
_PREC_AND = 2
_PREC_NOT = 3
_PREC_CMP = 4
_PREC_ADD = 5
_PREC_MUL = 6
_PREC_UNARY = 7
_PREC_POSTFIX = 8

_BIN_PREC = {
    "or": _PREC_OR,
    "and": _PREC_AND,
    "==": _PREC_CMP,
    "!=": _PREC_CMP,
    "<": _PREC_CMP,
    "<=": _PREC_CMP,
    ">": _PREC_CMP,
    ">=": _PREC_CMP,
    "+": _PREC_ADD,
    "-": _PREC_ADD,
    "*": _PREC_MUL,
    "/": _PREC_MUL,
}


def pretty_print(ast: MethodAst) -> str:
    """Render a method body in canonical form (trailing newline included
    unless the body is empty)."""
    lines: List[str] = []
    for stmt in ast.statements:
        _print_stmt(stmt, 0, lines)
    return "\n".join(lines) + ("\n" if lines else "")


def format_string_literal(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_real(value: float) -> str:
    """Shortest-round-trip decimal with a mandatory fraction part.

    repr() already gives the shortest form; exponent notation is expanded
    because the lexer only accepts plain `digits.digits` literals.
    """
    text = repr(value)
    if "e" in text or "E" in text:
        text = format(Decimal(text), "f")
    if "." not in text:
        text += ".0"
    return text


def _print_block(stmts, indent: int, lines: List[str]):
    for stmt in stmts:
        _print_stmt(stmt, indent, lines)


def _print_stmt(stmt: Stmt, indent: int, lines: List[str]):
    pad = "    " * indent
    if isinstance(stmt, CreateStmt):
        lines.append(f"{pad}create object instance {stmt.var} of {stmt.cls};")
    elif isinstance(stmt, DeleteStmt):
        lines.append(f"{pad}delete object instance {stmt.var};")
    elif isinstance(stmt, AssignStmt):
        lv = stmt.target.name if stmt.target.attr is None else f"{stmt.target.name}.{stmt.target.attr}"
        lines.append(f"{pad}{lv} = {_expr(stmt.expr, 0)};")
    elif isinstance(stmt, SelectInstStmt):
        where = f" where ({_expr(stmt.where, 0)})" if stmt.where is not None else ""
        lines.append(
            f"{pad}select {stmt.kind} {stmt.var} from instances of {stmt.cls}{where};"
        )
    elif isinstance(stmt, SelectRelStmt):
        chain = "".join(f"->{cls}[{rel}]" for cls, rel in stmt.steps)
        lines.append(f"{pad}select {stmt.kind} {stmt.var} related by {stmt.start}{chain};")
    elif isinstance(stmt, RelateStmt):
        lines.append(f"{pad}relate {stmt.a} to {stmt.b} across {stmt.rel};")
    elif isinstance(stmt, UnrelateStmt):
        lines.append(f"{pad}unrelate {stmt.a} from {stmt.b} across {stmt.rel};")
    elif isinstance(stmt, IfStmt):
        first_cond, first_block = stmt.arms[0]
        lines.append(f"{pad}if ({_expr(first_cond, 0)})")
        _print_block(first_block, indent + 1, lines)
        for cond, block in stmt.arms[1:]:
            lines.append(f"{pad}elif ({_expr(cond, 0)})")
            _print_block(block, indent + 1, lines)
        if stmt.else_block is not None:
            lines.append(f"{pad}else")
            _print_block(stmt.else_block, indent + 1, lines)
        lines.append(f"{pad}end if;")
    elif isinstance(stmt, WhileStmt):
        lines.append(f"{pad}while ({_expr(stmt.cond, 0)})")
        _print_block(stmt.body, indent + 1, lines)
        lines.append(f"{pad}end while;")
    elif isinstance(stmt, ForEachStmt):
        lines.append(f"{pad}for each {stmt.var} in {stmt.set_var}")
        _print_block(stmt.body, indent + 1, lines)
        lines.append(f"{pad}end for;")
    elif isinstance(stmt, ReturnStmt):
        if stmt.expr is None:
            lines.append(f"{pad}return;")
        else:
            lines.append(f"{pad}return {_expr(stmt.expr, 0)};")
    elif isinstance(stmt, CallStmt):
        lines.append(f"{pad}{_expr(stmt.call, 0)};")
    else:
        raise TypeError(f"unknown statement node: {stmt!r}")


def _prec(expr: Expr) -> int:
    if isinstance(expr, BinaryOp):
        return _BIN_PREC[expr.op]
    if isinstance(expr, UnaryOp):
        return _PREC_NOT if expr.op == "not" else _PREC_UNARY
    return _PREC_POSTFIX


def _expr(expr: Expr, min_prec: int) -> str:
    text, prec = _render(expr)
    if prec < min_prec:
        return f"({text})"
    return text


def _render(expr: Expr):
    if isinstance(expr, IntLit):
        return str(expr.value), _PREC_POSTFIX
    if isinstance(expr, RealLit):
        return format_real(expr.value), _PREC_POSTFIX
    if isinstance(expr, StringLit):
        return format_string_literal(expr.value), _PREC_POSTFIX
    if isinstance(expr, BoolLit):
        return ("true" if expr.value else "false"), _PREC_POSTFIX
    if isinstance(expr, NoneLit):
        return "none", _PREC_POSTFIX
    if isinstance(expr, VarRef):
        return expr.name, _PREC_POSTFIX
    if isinstance(expr, SelfRef):
        return "self", _PREC_POSTFIX
    if isinstance(expr, SelectedRef):
        return "selected", _PREC_POSTFIX
    if isinstance(expr, AttrAccess):
        return f"{_expr(expr.receiver, _PREC_POSTFIX)}.{expr.attr}", _PREC_POSTFIX
    if isinstance(expr, CallExpr):
        args = ", ".join(_expr(a, 0) for a in expr.args)
        return f"{expr.receiver}.{expr.method}({args})", _PREC_POSTFIX
    if isinstance(expr, UnaryOp):
        prec = _prec(expr)
        sep = " " if expr.op not in ("-",) else ""
        operand = _expr(expr.operand, prec)
        return f"{expr.op}{sep}{operand}", prec
    if isinstance(expr, BinaryOp):
        prec = _prec(expr)
        # Left-associative: equal precedence allowed on the left only.
        # Comparisons are non-associative: both sides must bind tighter.
        lhs_min = prec + 1 if prec == _PREC_CMP else prec
        rhs_min = prec + 1
        lhs = _expr(expr.lhs, lhs_min)
        rhs = _expr(expr.rhs, rhs_min)
        return f"{lhs} {expr.op} {rhs}", prec
    raise TypeError(f"unknown expression node: {expr!r}")
