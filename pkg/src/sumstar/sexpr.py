"""Position-tracking s-expression reader and writer.

The reader produces a small node algebra (symbols, naturals, lists),
each node carrying the 1-based line and column where it started, so
higher layers can report precise locations.  Comments run from ``;`` to
end of line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .errors import ParseError


@dataclass(frozen=True)
class Sym:
    text: str
    line: int
    col: int


@dataclass(frozen=True)
class Num:
    value: int
    line: int
    col: int


@dataclass(frozen=True)
class SList:
    items: tuple["SNode", ...]
    line: int
    col: int


SNode = Union[Sym, Num, SList]

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>;[^\n]*)
  | (?P<open>\()
  | (?P<close>\))
  | (?P<num>\d+)
  | (?P<sym>[^\s();]+)
    """,
    re.VERBOSE,
)

_SYMBOL_OK = re.compile(r"^[A-Za-z0-9_#'+*/<>=-]+$")


def _tokens(text: str):
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            yield kind, chunk, line, col
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    yield "eof", "", line, col


def read_all(text: str) -> list[SNode]:
    """Parse every top-level form in ``text``."""

    out: list[SNode] = []
    stack: list[tuple[list[SNode], int, int]] = []
    for kind, chunk, line, col in _tokens(text):
        if kind == "open":
            stack.append(([], line, col))
        elif kind == "close":
            if not stack:
                raise ParseError("unmatched ')'", line, col)
            items, l0, c0 = stack.pop()
            node = SList(tuple(items), l0, c0)
            (stack[-1][0] if stack else out).append(node)
        elif kind == "num":
            node = Num(int(chunk), line, col)
            (stack[-1][0] if stack else out).append(node)
        elif kind == "sym":
            if not _SYMBOL_OK.match(chunk):
                raise ParseError(f"bad token {chunk!r}", line, col)
            node = Sym(chunk, line, col)
            (stack[-1][0] if stack else out).append(node)
        else:  # eof
            if stack:
                raise ParseError("unclosed '('", stack[-1][1], stack[-1][2])
    return out


def write(node: SNode) -> str:
    if isinstance(node, Sym):
        return node.text
    if isinstance(node, Num):
        return str(node.value)
    return "(" + " ".join(write(item) for item in node.items) + ")"


def plain(*parts) -> SList:
    """Build a position-less list node from symbols, ints, and nodes."""

    items = []
    for p in parts:
        if isinstance(p, (Sym, Num, SList)):
            items.append(p)
        elif isinstance(p, int):
            items.append(Num(p, 0, 0))
        elif isinstance(p, str):
            items.append(Sym(p, 0, 0))
        else:
            raise TypeError(f"cannot embed {type(p).__name__} in an s-expression")
    return SList(tuple(items), 0, 0)
