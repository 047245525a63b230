"""Recursive-descent parser for the action-language subset.

Statement-level error recovery: a syntax error records a diagnostic and
skips ahead to the next `;` (or a block boundary), so one bad statement
does not hide later ones.  Nesting depth is capped to keep arbitrary input
from exhausting the interpreter stack; the cap is far beyond anything a
hand-written method body reaches.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

from .ast import (
    AssignStmt,
    AttrAccess,
    BinaryOp,
    BoolLit,
    CallExpr,
    CallStmt,
    CreateStmt,
    DeleteStmt,
    Diagnostic,
    Expr,
    ForEachStmt,
    IfStmt,
    IntLit,
    LValue,
    MethodAst,
    NoneLit,
    RealLit,
    RelateStmt,
    ReturnStmt,
    SelectInstStmt,
    SelectRelStmt,
    SelectedRef,
    SelfRef,
    SourceSpan,
    Stmt,
    StringLit,
    UnaryOp,
    UnrelateStmt,
    VarRef,
    WhileStmt,
)
from .lexer import Token, tokenize

MAX_NESTING = 64

_COMPARISON_OPS = ("==", "!=", "<", "<=", ">", ">=")
_BLOCK_STOPS = ("end", "elif", "else")


class _SyntaxError(Exception):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(message)
        self.message = message
        self.span = span


@dataclass
class ParseResult:
    """Outcome of parsing one method body.

    `ast` is present iff no error-severity diagnostics were produced.
    """

    ast: Optional[MethodAst]
    diagnostics: List[Diagnostic]

    @property
    def ok(self) -> bool:
        return self.ast is not None


def parse_method_body(source: str) -> ParseResult:
    tokens, diags = tokenize(source)
    parser = _Parser(tokens)
    stmts = parser.parse_body()
    all_diags = diags + parser.diagnostics
    if any(d.severity == "error" for d in all_diags):
        return ParseResult(None, all_diags)
    return ParseResult(MethodAst(tuple(stmts)), all_diags)


class _Parser:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0
        self.diagnostics: List[Diagnostic] = []
        self.depth = 0

    # -- token plumbing ---------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        i = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[i]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at_kw(self, word: str) -> bool:
        return self.peek().is_kw(word)

    def expect(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise _SyntaxError(f"expected {what}, found {self._describe(tok)}", tok.span)
        return self.advance()

    def expect_kw(self, word: str) -> Token:
        tok = self.peek()
        if not tok.is_kw(word):
            raise _SyntaxError(f"expected '{word}', found {self._describe(tok)}", tok.span)
        return self.advance()

    @staticmethod
    def _describe(tok: Token) -> str:
        if tok.kind == "eof":
            return "end of input"
        return f"'{tok.text}'"

    def error(self, message: str) -> _SyntaxError:
        return _SyntaxError(message, self.peek().span)

    def _nest(self):
        self.depth += 1
        if self.depth > MAX_NESTING:
            raise self.error("nesting too deep")

    def _unnest(self):
        self.depth -= 1

    # -- statements -------------------------------------------------------

    def parse_body(self) -> List[Stmt]:
        stmts = self._parse_stmts(top_level=True)
        tok = self.peek()
        if tok.kind != "eof":
            self._report(_SyntaxError(f"unexpected {self._describe(tok)}", tok.span))
        return stmts

    def _parse_stmts(self, top_level: bool) -> List[Stmt]:
        stmts: List[Stmt] = []
        while True:
            tok = self.peek()
            if tok.kind == "eof":
                break
            if not top_level and tok.kind == "kw" and tok.text in _BLOCK_STOPS:
                break
            before = self.pos
            try:
                stmts.append(self.parse_stmt())
            except _SyntaxError as err:
                self._report(err)
                self._synchronize(top_level)
                if self.pos == before:  # never stall on a stop token
                    self.advance()
                    if self.peek().kind == "eof" and self.pos == before:
                        break
        return stmts

    def _report(self, err: _SyntaxError):
        self.diagnostics.append(Diagnostic("error", err.message, err.span))

    def _synchronize(self, top_level: bool):
        while True:
            tok = self.peek()
            if tok.kind == "eof":
                return
            if tok.kind == ";":
                self.advance()
                return
            if not top_level and tok.kind == "kw" and tok.text in _BLOCK_STOPS:
                return
            self.advance()

    def parse_stmt(self) -> Stmt:
        tok = self.peek()
        if tok.kind == "kw":
            word = tok.text
            if word == "create":
                return self._parse_create()
            if word == "delete":
                return self._parse_delete()
            if word == "assign":
                self.advance()
                return self._parse_assignment(first=None)
            if word == "select":
                return self._parse_select()
            if word == "relate":
                return self._parse_relate()
            if word == "unrelate":
                return self._parse_unrelate()
            if word == "if":
                return self._parse_if()
            if word == "while":
                return self._parse_while()
            if word == "for":
                return self._parse_for_each()
            if word == "return":
                return self._parse_return()
            if word == "self":
                return self._parse_assignment_or_call()
            raise self.error(f"unexpected '{word}'")
        if tok.kind in ("ident", "relid"):
            return self._parse_assignment_or_call()
        raise self.error(f"expected a statement, found {self._describe(tok)}")

    def _stmt_span(self, first: Token, last: Token) -> SourceSpan:
        return SourceSpan.merge(first.span, last.span)

    def _parse_create(self) -> Stmt:
        first = self.expect_kw("create")
        self.expect_kw("object")
        self.expect_kw("instance")
        var = self.expect("ident", "a variable name").text
        self.expect_kw("of")
        cls = self.expect("ident", "a class name").text
        last = self.expect(";", "';'")
        return CreateStmt(var, cls, span=self._stmt_span(first, last))

    def _parse_delete(self) -> Stmt:
        first = self.expect_kw("delete")
        self.expect_kw("object")
        self.expect_kw("instance")
        var = self.expect("ident", "a variable name").text
        last = self.expect(";", "';'")
        return DeleteStmt(var, span=self._stmt_span(first, last))

    def _parse_assignment_or_call(self) -> Stmt:
        # IDENT/self followed by `.name(` is a call statement; otherwise an
        # assignment (`x = e;`, `x.a = e;`, `self.a = e;`).
        first = self.peek()
        if first.is_kw("self"):
            recv = self.advance()
            self.expect(".", "'.'")
            name = self.expect("ident", "an attribute or method name").text
            if self.peek().kind == "(":
                call = self._finish_call("self", name, recv.span)
                last = self.expect(";", "';'")
                return CallStmt(call, span=self._stmt_span(recv, last))
            target = LValue("self", name, span=recv.span)
            return self._parse_assignment(first=(recv, target))
        recv = self.advance()  # ident or relid (R-names are not assignable)
        if recv.kind == "relid":
            raise _SyntaxError(
                f"'{recv.text}' is reserved for relation ids", recv.span
            )
        if self.peek().kind == ".":
            self.advance()
            name = self.expect("ident", "an attribute or method name").text
            if self.peek().kind == "(":
                call = self._finish_call(recv.text, name, recv.span)
                last = self.expect(";", "';'")
                return CallStmt(call, span=self._stmt_span(recv, last))
            target = LValue(recv.text, name, span=recv.span)
            return self._parse_assignment(first=(recv, target))
        target = LValue(recv.text, None, span=recv.span)
        return self._parse_assignment(first=(recv, target))

    def _parse_assignment(self, first) -> Stmt:
        if first is None:
            recv = self.expect("ident", "an assignment target")
            if self.peek().kind == ".":
                self.advance()
                attr = self.expect("ident", "an attribute name").text
                target = LValue(recv.text, attr, span=recv.span)
            else:
                target = LValue(recv.text, None, span=recv.span)
            head = recv
        else:
            head, target = first
        self.expect("=", "'='")
        expr = self.parse_expr()
        last = self.expect(";", "';'")
        return AssignStmt(target, expr, span=self._stmt_span(head, last))

    def _parse_select(self) -> Stmt:
        first = self.expect_kw("select")
        kind_tok = self.peek()
        if not (kind_tok.is_kw("any") or kind_tok.is_kw("many") or kind_tok.is_kw("one")):
            raise self.error("expected 'any', 'many' or 'one' after 'select'")
        kind = self.advance().text
        var = self.expect("ident", "a variable name").text
        if self.at_kw("related"):
            self.advance()
            self.expect_kw("by")
            start = self.expect("ident", "a starting variable").text
            steps: List[Tuple[str, str]] = []
            while self.peek().kind == "->":
                self.advance()
                cls = self.expect("ident", "a class name").text
                self.expect("[", "'['")
                rel = self.expect("relid", "a relation id").text
                self.expect("]", "']'")
                steps.append((cls, rel))
            if not steps:
                raise self.error("expected '->' navigation step")
            last = self.expect(";", "';'")
            return SelectRelStmt(
                kind, var, start, tuple(steps), span=self._stmt_span(first, last)
            )
        if kind == "one":
            raise self.error("'select one' is only valid with 'related by'")
        self.expect_kw("from")
        self.expect_kw("instances")
        self.expect_kw("of")
        cls = self.expect("ident", "a class name").text
        where = None
        if self.at_kw("where"):
            self.advance()
            self.expect("(", "'('")
            where = self.parse_expr()
            self.expect(")", "')'")
        last = self.expect(";", "';'")
        return SelectInstStmt(kind, var, cls, where, span=self._stmt_span(first, last))

    def _parse_relate(self) -> Stmt:
        first = self.expect_kw("relate")
        a = self.expect("ident", "a variable name").text
        self.expect_kw("to")
        b = self.expect("ident", "a variable name").text
        self.expect_kw("across")
        rel = self.expect("relid", "a relation id").text
        last = self.expect(";", "';'")
        return RelateStmt(a, b, rel, span=self._stmt_span(first, last))

    def _parse_unrelate(self) -> Stmt:
        first = self.expect_kw("unrelate")
        a = self.expect("ident", "a variable name").text
        self.expect_kw("from")
        b = self.expect("ident", "a variable name").text
        self.expect_kw("across")
        rel = self.expect("relid", "a relation id").text
        last = self.expect(";", "';'")
        return UnrelateStmt(a, b, rel, span=self._stmt_span(first, last))

    def _parse_cond_header(self, keyword: str) -> Tuple[Expr, SourceSpan, Token]:
        first = self.expect_kw(keyword)
        self.expect("(", "'('")
        cond = self.parse_expr()
        close = self.expect(")", "')'")
        return cond, self._stmt_span(first, close), first

    def _parse_if(self) -> Stmt:
        self._nest()
        try:
            cond, header_span, _ = self._parse_cond_header("if")
            arms = [(cond, tuple(self._parse_stmts(top_level=False)))]
            arm_spans = [header_span]
            while self.at_kw("elif"):
                econd, espan, _ = self._parse_cond_header("elif")
                arms.append((econd, tuple(self._parse_stmts(top_level=False))))
                arm_spans.append(espan)
            else_block = None
            if self.at_kw("else"):
                self.advance()
                else_block = tuple(self._parse_stmts(top_level=False))
            self.expect_kw("end")
            self.expect_kw("if")
            self.expect(";", "';'")
            return IfStmt(
                tuple(arms), else_block, span=header_span, arm_spans=tuple(arm_spans)
            )
        finally:
            self._unnest()

    def _parse_while(self) -> Stmt:
        self._nest()
        try:
            cond, header_span, _ = self._parse_cond_header("while")
            body = tuple(self._parse_stmts(top_level=False))
            self.expect_kw("end")
            self.expect_kw("while")
            self.expect(";", "';'")
            return WhileStmt(cond, body, span=header_span)
        finally:
            self._unnest()

    def _parse_for_each(self) -> Stmt:
        self._nest()
        try:
            first = self.expect_kw("for")
            self.expect_kw("each")
            var = self.expect("ident", "a loop variable").text
            self.expect_kw("in")
            set_tok = self.expect("ident", "a set variable")
            body = tuple(self._parse_stmts(top_level=False))
            self.expect_kw("end")
            self.expect_kw("for")
            self.expect(";", "';'")
            return ForEachStmt(
                var, set_tok.text, body, span=self._stmt_span(first, set_tok)
            )
        finally:
            self._unnest()

    def _parse_return(self) -> Stmt:
        first = self.expect_kw("return")
        expr = None
        if self.peek().kind != ";":
            expr = self.parse_expr()
        last = self.expect(";", "';'")
        return ReturnStmt(expr, span=self._stmt_span(first, last))

    # -- expressions --------------------------------------------------------
    # Precedence (low to high): or; and; not; comparisons (non-associative);
    # + -; * /; unary - cardinality empty not_empty; postfix/primary.

    def parse_expr(self) -> Expr:
        self._nest()
        try:
            return self._parse_or()
        finally:
            self._unnest()

    def _parse_or(self) -> Expr:
        lhs = self._parse_and()
        while self.at_kw("or"):
            self.advance()
            rhs = self._parse_and()
            lhs = BinaryOp("or", lhs, rhs, span=SourceSpan.merge(_sp(lhs), _sp(rhs)))
        return lhs

    def _parse_and(self) -> Expr:
        lhs = self._parse_not()
        while self.at_kw("and"):
            self.advance()
            rhs = self._parse_not()
            lhs = BinaryOp("and", lhs, rhs, span=SourceSpan.merge(_sp(lhs), _sp(rhs)))
        return lhs

    def _parse_not(self) -> Expr:
        if self.at_kw("not"):
            self._nest()
            try:
                first = self.advance()
                operand = self._parse_not()
                return UnaryOp(
                    "not", operand, span=SourceSpan.merge(first.span, _sp(operand))
                )
            finally:
                self._unnest()
        return self._parse_comparison()

    def _parse_comparison(self) -> Expr:
        lhs = self._parse_additive()
        if self.peek().kind in _COMPARISON_OPS:
            op = self.advance().text
            rhs = self._parse_additive()
            if self.peek().kind in _COMPARISON_OPS:
                raise self.error("comparisons are non-associative; use parentheses")
            return BinaryOp(op, lhs, rhs, span=SourceSpan.merge(_sp(lhs), _sp(rhs)))
        return lhs

    def _parse_additive(self) -> Expr:
        lhs = self._parse_term()
        while self.peek().kind in ("+", "-"):
            op = self.advance().text
            rhs = self._parse_term()
            lhs = BinaryOp(op, lhs, rhs, span=SourceSpan.merge(_sp(lhs), _sp(rhs)))
        return lhs

    def _parse_term(self) -> Expr:
        lhs = self._parse_unary()
        while self.peek().kind in ("*", "/"):
            op = self.advance().text
            rhs = self._parse_unary()
            lhs = BinaryOp(op, lhs, rhs, span=SourceSpan.merge(_sp(lhs), _sp(rhs)))
        return lhs

    def _parse_unary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "-" or tok.is_kw("cardinality") or tok.is_kw("empty") or tok.is_kw("not_empty"):
            self._nest()
            try:
                first = self.advance()
                operand = self._parse_unary()
                op = first.text
                return UnaryOp(op, operand, span=SourceSpan.merge(first.span, _sp(operand)))
            finally:
                self._unnest()
        return self._parse_postfix()

    def _parse_postfix(self) -> Expr:
        expr = self._parse_primary()
        while self.peek().kind == ".":
            self.advance()
            name = self.expect("ident", "an attribute or method name")
            if self.peek().kind == "(":
                if isinstance(expr, VarRef):
                    expr = self._finish_call(expr.name, name.text, _sp(expr))
                elif isinstance(expr, SelfRef):
                    expr = self._finish_call("self", name.text, _sp(expr))
                else:
                    raise _SyntaxError(
                        "call receiver must be a simple name or 'self'", name.span
                    )
            else:
                expr = AttrAccess(
                    expr, name.text, span=SourceSpan.merge(_sp(expr), name.span)
                )
        return expr

    def _finish_call(self, receiver: str, method: str, start: SourceSpan) -> CallExpr:
        self.expect("(", "'('")
        args: List[Expr] = []
        if self.peek().kind != ")":
            args.append(self.parse_expr())
            while self.peek().kind == ",":
                self.advance()
                args.append(self.parse_expr())
        close = self.expect(")", "')'")
        return CallExpr(receiver, method, tuple(args), span=SourceSpan.merge(start, close.span))

    def _parse_primary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            return IntLit(int(tok.text), span=tok.span)
        if tok.kind == "real":
            self.advance()
            return RealLit(float(tok.text), span=tok.span)
        if tok.kind == "string":
            self.advance()
            return StringLit(tok.text, span=tok.span)
        if tok.kind == "kw":
            if tok.text == "true":
                self.advance()
                return BoolLit(True, span=tok.span)
            if tok.text == "false":
                self.advance()
                return BoolLit(False, span=tok.span)
            if tok.text == "none":
                self.advance()
                return NoneLit(span=tok.span)
            if tok.text == "self":
                self.advance()
                return SelfRef(span=tok.span)
            if tok.text == "selected":
                self.advance()
                return SelectedRef(span=tok.span)
            raise self.error(f"unexpected '{tok.text}' in expression")
        if tok.kind == "ident":
            self.advance()
            return VarRef(tok.text, span=tok.span)
        if tok.kind == "(":
            self.advance()
            expr = self.parse_expr()
            self.expect(")", "')'")
            return expr
        raise self.error(f"expected an expression, found {self._describe(tok)}")


def _sp(node) -> SourceSpan:
    return node.span
