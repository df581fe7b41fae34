"""Tokenizer for the surface language.

The surface alphabet is ASCII only. Identifiers are letters followed by
letters, digits, primes, and internal hyphens; a hyphen joins an identifier
only when the next character could continue it, so `x->y` and `p--q` still
lex as arrow and comment. Comments are `--` to end of line and nestable
`{- -}` blocks.
"""
from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import ErrorCode, SourceSpan, fail

KEYWORDS = frozenset({"def", "axiom", "hit", "where", "point", "path", "in", "Type"})

_SINGLE = "(){}[],.:*=\\@_|"
_LETTERS = frozenset("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
_IDENT_CONT = _LETTERS | frozenset("0123456789'")


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # "name", "number", "eof", a keyword, or the punctuation itself
    text: str
    span: SourceSpan


class _Scanner:
    def __init__(self, source: str, filename: str):
        self.source = source
        self.filename = filename
        self.pos = 0
        self.line = 1
        self.col = 1

    def peek(self, offset: int = 0) -> str:
        i = self.pos + offset
        return self.source[i] if i < len(self.source) else ""

    def advance(self, count: int = 1) -> None:
        for _ in range(count):
            if self.source[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def here(self) -> tuple[int, int]:
        return self.line, self.col

    def span_from(self, start: tuple[int, int]) -> SourceSpan:
        return SourceSpan(self.filename, start[0], start[1], self.line, self.col)


def tokenize(source: str, filename: str = "<input>") -> list[Token]:
    """Lex source into tokens with spans, or raise CheckError with E-PARSE."""
    sc = _Scanner(source, filename)
    tokens: list[Token] = []
    while sc.pos < len(sc.source):
        ch = sc.peek()
        if ch in " \t\r\n":
            sc.advance()
            continue
        if ch == "-" and sc.peek(1) == "-":
            while sc.pos < len(sc.source) and sc.peek() != "\n":
                sc.advance()
            continue
        if ch == "{" and sc.peek(1) == "-":
            start = sc.here()
            sc.advance(2)
            depth = 1
            while sc.pos < len(sc.source) and depth > 0:
                if sc.peek() == "{" and sc.peek(1) == "-":
                    depth += 1
                    sc.advance(2)
                elif sc.peek() == "-" and sc.peek(1) == "}":
                    depth -= 1
                    sc.advance(2)
                else:
                    sc.advance()
            if depth > 0:
                fail(ErrorCode.PARSE, "unterminated block comment",
                     sc.span_from(start))
            continue
        start = sc.here()
        if ch in _LETTERS:
            begin = sc.pos
            while sc.pos < len(sc.source):
                c = sc.peek()
                if c in _IDENT_CONT:
                    sc.advance()
                elif c == "-" and sc.peek(1) in _IDENT_CONT:
                    sc.advance()
                else:
                    break
            text = sc.source[begin:sc.pos]
            kind = text if text in KEYWORDS else "name"
            tokens.append(Token(kind, text, sc.span_from(start)))
            continue
        if ch.isdigit() and ch.isascii():
            begin = sc.pos
            while sc.pos < len(sc.source) and sc.peek().isdigit() and sc.peek().isascii():
                sc.advance()
            tokens.append(Token("number", sc.source[begin:sc.pos], sc.span_from(start)))
            continue
        two = sc.peek() + sc.peek(1)
        if two in (":=", "->"):
            sc.advance(2)
            tokens.append(Token(two, two, sc.span_from(start)))
            continue
        if ch in _SINGLE:
            sc.advance()
            tokens.append(Token(ch, ch, sc.span_from(start)))
            continue
        sc.advance()
        fail(ErrorCode.PARSE, f"illegal character {ch!r}", sc.span_from(start))
    tokens.append(Token("eof", "", SourceSpan(filename, sc.line, sc.col, sc.line, sc.col)))
    return tokens
