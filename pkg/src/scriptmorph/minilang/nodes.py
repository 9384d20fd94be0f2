"""Attributed syntax tree for the mini scripting language.

Every node carries a ``kind``, an optional ``name`` and an ordered list of
``children``.  Literal values are stored in ``name`` (numbers as their
decimal text) so the whole tree serializes through the same three
attributes.  Source spans are kept for diagnostics only and never take part
in equality or serialization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

PROGRAM = "Program"
ASSIGN = "Assign"
ECHO = "Echo"
IF = "If"
CALL = "Call"
VAR = "Var"
STR_LIT = "StrLit"
NUM_LIT = "NumLit"
BIN_OP = "BinOp"
BLOCK = "Block"

NODE_KINDS = frozenset(
    {PROGRAM, ASSIGN, ECHO, IF, CALL, VAR, STR_LIT, NUM_LIT, BIN_OP, BLOCK}
)


@dataclass(frozen=True)
class Span:
    """Half-open source region, 1-based line and column."""

    line: int
    col: int
    end_line: int
    end_col: int


@dataclass
class Node:
    kind: str
    name: Optional[str] = None
    children: list["Node"] = field(default_factory=list)
    span: Optional[Span] = None

    def __post_init__(self):
        if self.kind not in NODE_KINDS:
            raise ValueError(f"unknown node kind: {self.kind!r}")

    def structural_equal(self, other: "Node") -> bool:
        """Equality over (kind, name, children), ignoring spans."""
        if self.kind != other.kind or self.name != other.name:
            return False
        if len(self.children) != len(other.children):
            return False
        return all(
            a.structural_equal(b) for a, b in zip(self.children, other.children)
        )
