"""Lowers syntax trees to stack-machine programs.

Lowering rules: left-to-right evaluation, no short-circuiting, ``If``
becomes JMPZ/JMP with absolute targets, and a trailing RETURN is always
appended.  Variable slots are numbered by first textual occurrence (a
dedicated pre-pass walks the tree in source order), so two programs that
differ only by a consistent renaming lower to identical instructions.

Expression statements leave their value on the operand stack; RETURN
discards whatever remains.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Union

from .errors import InvalidProgramError
from .nodes import (
    ASSIGN,
    BIN_OP,
    CALL,
    ECHO,
    IF,
    NUM_LIT,
    PROGRAM,
    STR_LIT,
    VAR,
    Node,
)
from .opcodes import CODE_OF, JUMP_OPS, SLOT_OPS

Operand = Union[int, str, None]

_BINOP_MNEMONIC = {
    ".": "CONCAT",
    "+": "ADD",
    "-": "SUB",
    "*": "MUL",
    "/": "DIV",
    "==": "CMP_EQ",
    "!=": "CMP_NE",
    "<": "CMP_LT",
    ">": "CMP_GT",
}


@dataclass(frozen=True)
class Op:
    mnemonic: str
    operand: Operand = None


@dataclass(frozen=True)
class OpcodeProgram:
    """Validated instruction sequence plus the variable slot map."""

    ops: tuple[Op, ...]
    slot_map: dict[str, int]

    def __post_init__(self):
        n = len(self.ops)
        if n == 0 or self.ops[-1].mnemonic != "RETURN":
            raise InvalidProgramError("program must end with RETURN")
        for idx, op in enumerate(self.ops):
            if op.mnemonic not in CODE_OF:
                raise InvalidProgramError(f"unknown mnemonic {op.mnemonic!r} at {idx}")
            if op.mnemonic in JUMP_OPS:
                if not isinstance(op.operand, int) or not 0 <= op.operand < n:
                    raise InvalidProgramError(
                        f"jump target {op.operand!r} out of range at {idx}"
                    )
            if op.mnemonic in SLOT_OPS and not isinstance(op.operand, int):
                raise InvalidProgramError(f"slot operand required at {idx}")

    @property
    def nslots(self) -> int:
        if not self.slot_map:
            return 0
        return max(self.slot_map.values()) + 1

    def serialize(self) -> str:
        """Stable one-op-per-line text form, used for opcode hashing."""
        lines = []
        for op in self.ops:
            if op.operand is None:
                lines.append(op.mnemonic)
            elif isinstance(op.operand, str):
                lines.append(f"{op.mnemonic} {json.dumps(op.operand, ensure_ascii=False)}")
            else:
                lines.append(f"{op.mnemonic} {op.operand}")
        return "\n".join(lines)


class _SlotAllocator:
    """Assigns slots by first occurrence in source order."""

    def __init__(self):
        self.slots: dict[str, int] = {}

    def visit(self, node: Node):
        if node.kind == VAR:
            if node.name not in self.slots:
                self.slots[node.name] = len(self.slots)
        for child in node.children:
            self.visit(child)


class _Emitter:
    def __init__(self, slots: dict[str, int]):
        self.slots = slots
        self.ops: list[Op] = []

    def emit(self, mnemonic: str, operand: Operand = None) -> int:
        self.ops.append(Op(mnemonic, operand))
        return len(self.ops) - 1

    def patch(self, idx: int, target: int):
        self.ops[idx] = Op(self.ops[idx].mnemonic, target)

    def statement(self, node: Node):
        if node.kind == ASSIGN:
            target, value = node.children
            self.expression(value)
            self.emit("ASSIGN", self.slots[target.name])
        elif node.kind == ECHO:
            for arg in node.children:
                self.expression(arg)
                self.emit("ECHO")
        elif node.kind == IF:
            cond = node.children[0]
            self.expression(cond)
            jmpz_at = self.emit("JMPZ", 0)
            self.block(node.children[1])
            if len(node.children) == 3:
                jmp_at = self.emit("JMP", 0)
                self.patch(jmpz_at, len(self.ops))
                self.block(node.children[2])
                self.patch(jmp_at, len(self.ops))
            else:
                self.patch(jmpz_at, len(self.ops))
        else:
            self.expression(node)

    def block(self, node: Node):
        for stmt in node.children:
            self.statement(stmt)

    def expression(self, node: Node):
        if node.kind == NUM_LIT:
            self.emit("FETCH_CONST", int(node.name))
        elif node.kind == STR_LIT:
            self.emit("FETCH_CONST", node.name)
        elif node.kind == VAR:
            self.emit("FETCH_VAR", self.slots[node.name])
        elif node.kind == BIN_OP:
            self.expression(node.children[0])
            self.expression(node.children[1])
            self.emit(_BINOP_MNEMONIC[node.name])
        elif node.kind == CALL:
            self.emit("INIT_CALL", node.name)
            for arg in node.children:
                self.expression(arg)
                self.emit("SEND_ARG")
            self.emit("DO_CALL", len(node.children))
        else:
            raise InvalidProgramError(f"not an expression node: {node.kind}")


def compile_ast(ast: Node) -> OpcodeProgram:
    """Lower a parsed Program node to an OpcodeProgram."""
    if ast.kind != PROGRAM:
        raise InvalidProgramError("expected a Program node")
    allocator = _SlotAllocator()
    allocator.visit(ast)
    emitter = _Emitter(allocator.slots)
    for stmt in ast.children:
        emitter.statement(stmt)
    emitter.emit("RETURN")
    return OpcodeProgram(ops=tuple(emitter.ops), slot_map=dict(allocator.slots))
