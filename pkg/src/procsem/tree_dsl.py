"""Textual process-tree language: parsing and canonical rendering.

Grammar (whitespace between tokens is ignored):

    tree     := operator '(' tree (',' tree)* ')' | leaf
    operator := '->' | 'X' | '+' | '*'
    leaf     := 'tau' | quoted
    quoted   := "'" (escaped characters) "'"

Inside quoted labels, backslash escapes the next character, so labels may
contain quotes (``'it\\'s'``). Unicode operator spellings are accepted on
input and rewritten to their ASCII forms when rendering.

Directly-follows edges use one arrow per line: ``'a' -> 'b'``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .core import (
    ArityError,
    Leaf,
    OpKind,
    Operator,
    ProcessTree,
    Silent,
    normalize_label,
)

MAX_DEPTH = 500

_UNICODE_OPS = {
    "\u2192": "->",  # →
    "\u00d7": "X",  # ×
    "\u2227": "+",  # ∧
    "\u21ba": "*",  # ↺
}

_OP_TOKENS = {
    "->": OpKind.SEQ,
    "X": OpKind.XOR,
    "+": OpKind.AND,
    "*": OpKind.LOOP,
}

_TAU_SPELLINGS = {"tau", "\u03c4"}  # τ


class TreeSyntaxError(ValueError):
    """Raised for any malformed tree text; carries the offending position."""

    def __init__(self, position: int, reason: str) -> None:
        super().__init__(f"at position {position}: {reason}")
        self.position = position
        self.reason = reason


@dataclass(frozen=True)
class _Token:
    kind: str  # "op", "lparen", "rparen", "comma", "label", "tau"
    value: str
    position: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _UNICODE_OPS:
            tokens.append(_Token("op", _UNICODE_OPS[ch], i))
            i += 1
            continue
        if text.startswith("->", i):
            tokens.append(_Token("op", "->", i))
            i += 2
            continue
        if ch in "X+*":
            tokens.append(_Token("op", ch, i))
            i += 1
            continue
        if ch == "(":
            tokens.append(_Token("lparen", ch, i))
            i += 1
            continue
        if ch == ")":
            tokens.append(_Token("rparen", ch, i))
            i += 1
            continue
        if ch == ",":
            tokens.append(_Token("comma", ch, i))
            i += 1
            continue
        if ch == "'":
            j = i + 1
            parts: list[str] = []
            while j < n:
                c = text[j]
                if c == "\\":
                    if j + 1 >= n:
                        raise TreeSyntaxError(j, "dangling escape in label")
                    parts.append(text[j + 1])
                    j += 2
                    continue
                if c == "'":
                    break
                parts.append(c)
                j += 1
            else:
                raise TreeSyntaxError(i, "unterminated label")
            if j >= n:
                raise TreeSyntaxError(i, "unterminated label")
            tokens.append(_Token("label", "".join(parts), i))
            i = j + 1
            continue
        if ch.isalpha():
            j = i
            while j < n and text[j].isalpha():
                j += 1
            word = text[i:j]
            if word in _TAU_SPELLINGS:
                tokens.append(_Token("tau", word, i))
                i = j
                continue
            raise TreeSyntaxError(i, f"unexpected word {word!r}")
        raise TreeSyntaxError(i, f"unexpected character {ch!r}")
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], text_length: int) -> None:
        self.tokens = tokens
        self.pos = 0
        self.end = text_length

    def peek(self) -> _Token | None:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos]
        return None

    def take(self, kind: str) -> _Token:
        tok = self.peek()
        if tok is None:
            raise TreeSyntaxError(self.end, f"expected {kind}, found end of input")
        if tok.kind != kind:
            raise TreeSyntaxError(tok.position, f"expected {kind}, found {tok.kind}")
        self.pos += 1
        return tok

    def parse_tree(self, depth: int) -> ProcessTree:
        if depth > MAX_DEPTH:
            tok = self.peek()
            position = tok.position if tok else self.end
            raise TreeSyntaxError(position, f"nesting deeper than {MAX_DEPTH}")
        tok = self.peek()
        if tok is None:
            raise TreeSyntaxError(self.end, "expected a tree, found end of input")
        if tok.kind == "label":
            self.pos += 1
            try:
                label = normalize_label(tok.value)
            except ValueError:
                raise TreeSyntaxError(tok.position, "empty activity label") from None
            return Leaf(label)
        if tok.kind == "tau":
            self.pos += 1
            return Silent()
        if tok.kind == "op":
            self.pos += 1
            kind = _OP_TOKENS[tok.value]
            self.take("lparen")
            children = [self.parse_tree(depth + 1)]
            while True:
                nxt = self.peek()
                if nxt is not None and nxt.kind == "comma":
                    self.pos += 1
                    children.append(self.parse_tree(depth + 1))
                    continue
                break
            self.take("rparen")
            try:
                return Operator(kind, tuple(children))
            except ArityError as exc:
                raise TreeSyntaxError(tok.position, str(exc)) from None
        raise TreeSyntaxError(tok.position, f"unexpected {tok.kind}")


def parse_tree(text: str) -> ProcessTree:
    """Parse tree text into a process tree. Raises TreeSyntaxError."""
    tokens = _tokenize(text)
    parser = _Parser(tokens, len(text))
    tree = parser.parse_tree(0)
    trailing = parser.peek()
    if trailing is not None:
        raise TreeSyntaxError(trailing.position, "trailing input after tree")
    return tree


def _quote(label: str) -> str:
    escaped = label.replace("\\", "\\\\").replace("'", "\\'")
    return f"'{escaped}'"


def render_tree(tree: ProcessTree) -> str:
    """Canonical ASCII rendering; parse_tree(render_tree(t)) == t."""
    if isinstance(tree, Leaf):
        return _quote(tree.label)
    if isinstance(tree, Silent):
        return "tau"
    inner = ", ".join(render_tree(c) for c in tree.children)
    return f"{tree.kind.value}({inner})"


# ---------------------------------------------------------------------------
# Directly-follows edge lines

_EDGE_RE = re.compile(
    r"'((?:\\.|[^'\\])*)'\s*(?:->|\u2192)\s*'((?:\\.|[^'\\])*)'"
)


class EdgeSyntaxError(ValueError):
    """Raised in strict mode for a line that is not a well-formed edge."""

    def __init__(self, line_number: int, line: str) -> None:
        super().__init__(f"line {line_number}: not an edge: {line!r}")
        self.line_number = line_number
        self.line = line


@dataclass(frozen=True)
class EdgeParse:
    """Edges recovered from text plus the non-blank lines that matched nothing."""

    edges: tuple[tuple[str, str], ...]
    skipped: tuple[str, ...]


_UNESCAPE_RE = re.compile(r"\\(.)")


def _unescape(raw: str) -> str:
    return _UNESCAPE_RE.sub(r"\1", raw)


def parse_dfg_edges(text: str, strict: bool = False) -> EdgeParse:
    """Extract ``'a' -> 'b'`` edges, one per line.

    Lenient mode (default) scans each line for edge patterns and records
    non-blank lines without any match as skipped. Strict mode requires every
    non-blank line to be exactly one edge and raises EdgeSyntaxError otherwise.
    Labels are normalized; lines whose labels normalize to empty are skipped
    (lenient) or rejected (strict). Duplicate edges collapse to one.
    """
    edges: list[tuple[str, str]] = []
    seen: set[tuple[str, str]] = set()
    skipped: list[str] = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if strict:
            match = _EDGE_RE.fullmatch(stripped)
            if match is None:
                raise EdgeSyntaxError(line_number, stripped)
            matches = [match]
        else:
            matches = list(_EDGE_RE.finditer(line))
            if not matches:
                skipped.append(stripped)
                continue
        for match in matches:
            try:
                source = normalize_label(_unescape(match.group(1)))
                target = normalize_label(_unescape(match.group(2)))
            except ValueError:
                if strict:
                    raise EdgeSyntaxError(line_number, stripped) from None
                skipped.append(stripped)
                continue
            edge = (source, target)
            if edge not in seen:
                seen.add(edge)
                edges.append(edge)
    return EdgeParse(edges=tuple(edges), skipped=tuple(skipped))


def render_dfg_edges(edges: list[tuple[str, str]] | tuple[tuple[str, str], ...]) -> str:
    """Render edges one per line, sorted, in the same quoting as tree labels."""
    return "\n".join(f"{_quote(x)} -> {_quote(y)}" for x, y in sorted(edges))
