"""Instruction set of the stack machine.

Mnemonics are stable public names; the integer codes are an internal
encoding shared by the pure-Python and compiled execution kernels.
"""

MNEMONICS = (
    "ASSIGN",
    "FETCH_CONST",
    "FETCH_VAR",
    "CONCAT",
    "ADD",
    "SUB",
    "MUL",
    "DIV",
    "CMP_EQ",
    "CMP_NE",
    "CMP_LT",
    "CMP_GT",
    "JMP",
    "JMPZ",
    "ECHO",
    "INIT_CALL",
    "SEND_ARG",
    "DO_CALL",
    "RETURN",
)

CODE_OF = {name: i for i, name in enumerate(MNEMONICS)}

(
    OP_ASSIGN,
    OP_FETCH_CONST,
    OP_FETCH_VAR,
    OP_CONCAT,
    OP_ADD,
    OP_SUB,
    OP_MUL,
    OP_DIV,
    OP_CMP_EQ,
    OP_CMP_NE,
    OP_CMP_LT,
    OP_CMP_GT,
    OP_JMP,
    OP_JMPZ,
    OP_ECHO,
    OP_INIT_CALL,
    OP_SEND_ARG,
    OP_DO_CALL,
    OP_RETURN,
) = range(len(MNEMONICS))

# Ops whose operand is an index into the instruction list.
JUMP_OPS = frozenset({"JMP", "JMPZ"})
# Ops whose operand is a variable slot number.
SLOT_OPS = frozenset({"ASSIGN", "FETCH_VAR"})

# min/max argument counts of the interpreter builtins
BUILTIN_ARITY = {
    "upper": (1, 1),
    "lower": (1, 1),
    "rev": (1, 1),
    "len": (1, 1),
    "substr": (2, 3),
}
