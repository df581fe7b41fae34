"""Lexer oracle tests: token shapes, comments, spans, and rejections."""
import pytest

from hottcheck.diagnostics import CheckError, ErrorCode
from hottcheck.lexer import tokenize


def kinds(source):
    return [t.kind for t in tokenize(source, "test.hott")]


def texts(source):
    return [t.text for t in tokenize(source, "test.hott") if t.kind != "eof"]


def test_keywords_and_identifiers():
    assert kinds("def axiom hit where point path in Type foo") == [
        "def", "axiom", "hit", "where", "point", "path", "in", "Type",
        "name", "eof",
    ]


def test_identifier_shapes():
    assert texts("x x' x1 is-equiv S1-elim ap2") == [
        "x", "x'", "x1", "is-equiv", "S1-elim", "ap2",
    ]


def test_hyphen_needs_a_following_identifier_character():
    # `x -` must not lex the hyphen into the identifier
    toks = tokenize("x ->", "t.hott")
    assert [t.kind for t in toks] == ["name", "->", "eof"]


def test_line_comment():
    assert kinds("def -- the rest is gone\naxiom") == ["def", "axiom", "eof"]


def test_nested_block_comment():
    assert kinds("{- outer {- inner -} still out -} def") == ["def", "eof"]


def test_unterminated_block_comment():
    with pytest.raises(CheckError) as err:
        tokenize("{- never closed", "t.hott")
    assert err.value.diagnostic.code is ErrorCode.PARSE


def test_non_ascii_is_rejected():
    with pytest.raises(CheckError) as err:
        tokenize("λ x. x", "t.hott")
    assert err.value.diagnostic.code is ErrorCode.PARSE


def test_spans_are_one_based():
    toks = tokenize("def\n  foo", "t.hott")
    assert (toks[0].span.line, toks[0].span.col) == (1, 1)
    assert (toks[1].span.line, toks[1].span.col) == (2, 3)
    assert toks[1].span.file == "t.hott"


def test_punctuation_and_numbers():
    assert kinds("( ) { } [ ] , . : := -> * = \\ @ _ | 42") == [
        "(", ")", "{", "}", "[", "]", ",", ".", ":", ":=", "->", "*", "=",
        "\\", "@", "_", "|", "number", "eof",
    ]


def test_no_plus_token():
    with pytest.raises(CheckError) as err:
        tokenize("A + B", "t.hott")
    assert err.value.diagnostic.code is ErrorCode.PARSE
