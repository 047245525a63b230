"""Action-language front end: lexer, AST, parser, canonical printer."""

from .ast import (  # noqa: F401
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
from .lexer import Token, tokenize  # noqa: F401
from .parser import ParseResult, parse_method_body  # noqa: F401
from .printer import pretty_print  # noqa: F401
