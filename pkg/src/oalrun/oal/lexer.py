"""Longest-match lexer for the action-language subset.

Produces a token stream plus any lexical diagnostics; lexing never raises
and always terminates (every loop iteration consumes at least one
character).  `//` comments run to end of line, whitespace is insignificant.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Tuple

from .ast import Diagnostic, SourceSpan

KEYWORDS = frozenset(
    """create object instance of delete assign select any many one from
    instances where related by relate unrelate to across if elif else end
    while for each in return self selected true false none and or not
    cardinality empty not_empty""".split()
)

# Two-char operators first so longest-match wins.
_OPERATORS = ("->", "==", "!=", "<=", ">=", ";", "=", ".", ",", "(", ")", "[", "]", "+", "-", "*", "/", "<", ">")

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_RELID_RE = re.compile(r"R[0-9]+\Z")
_NUM_RE = re.compile(r"[0-9]+(\.[0-9]+)?")


@dataclass(frozen=True)
class Token:
    kind: str  # "kw" | "ident" | "relid" | "int" | "real" | "string" | operator | "eof"
    text: str  # decoded value for strings, source slice otherwise
    span: SourceSpan

    def is_kw(self, word: str) -> bool:
        return self.kind == "kw" and self.text == word


def tokenize(source: str) -> Tuple[List[Token], List[Diagnostic]]:
    """Lex `source` into tokens; lexical errors become diagnostics.

    The returned stream always ends with an "eof" token.
    """
    tokens: List[Token] = []
    diags: List[Diagnostic] = []
    line = 1
    col = 0
    i = 0
    n = len(source)

    def span(start_col: int, end_col: int) -> SourceSpan:
        return SourceSpan(line, start_col, end_col)

    while i < n:
        ch = source[i]

        if ch == "\n":
            i += 1
            line += 1
            col = 0
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "/" and i + 1 < n and source[i + 1] == "/":
            while i < n and source[i] != "\n":
                i += 1
                col += 1
            continue

        if "0" <= ch <= "9":
            mo = _NUM_RE.match(source, i)
            text = mo.group(0)
            kind = "real" if "." in text else "int"
            tokens.append(Token(kind, text, span(col, col + len(text))))
            i += len(text)
            col += len(text)
            continue

        mo = _IDENT_RE.match(source, i) if (ch.isalpha() or ch == "_") else None
        if mo is not None:
            text = mo.group(0)
            if text in KEYWORDS:
                kind = "kw"
            elif _RELID_RE.match(text):
                kind = "relid"
            else:
                kind = "ident"
            tokens.append(Token(kind, text, span(col, col + len(text))))
            i += len(text)
            col += len(text)
            continue

        if ch == '"':
            start_col = col
            i += 1
            col += 1
            parts: List[str] = []
            closed = False
            while i < n:
                c = source[i]
                if c == '"':
                    i += 1
                    col += 1
                    closed = True
                    break
                if c == "\n":
                    break
                if c == "\\":
                    if i + 1 < n and source[i + 1] in ('"', "\\"):
                        parts.append(source[i + 1])
                        i += 2
                        col += 2
                        continue
                    diags.append(
                        Diagnostic("error", "unsupported escape sequence", span(col, col + 2))
                    )
                    i += 1
                    col += 1
                    continue
                parts.append(c)
                i += 1
                col += 1
            if not closed:
                diags.append(
                    Diagnostic("error", "unterminated string", span(start_col, col))
                )
            else:
                tokens.append(Token("string", "".join(parts), span(start_col, col)))
            continue

        for op in _OPERATORS:
            if source.startswith(op, i):
                tokens.append(Token(op, op, span(col, col + len(op))))
                i += len(op)
                col += len(op)
                break
        else:
            diags.append(
                Diagnostic("error", f"illegal character {ch!r}", span(col, col + 1))
            )
            i += 1
            col += 1

    tokens.append(Token("eof", "", SourceSpan(line, col, col)))
    return tokens, diags
