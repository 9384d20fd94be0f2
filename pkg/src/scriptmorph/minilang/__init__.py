"""Self-contained mini scripting language: parse, canonicalize, compile, run.

The hot kernels (tokenizer, stack-machine loop, edit distance) exist twice:
a compiled extension and a pure-Python fallback, selected at import in
:mod:`scriptmorph.minilang.kernel`.
"""

from .canon import canonical_json
from .compiler import Op, OpcodeProgram, compile_ast
from .errors import InvalidProgramError, MiniLangError, ScriptSyntaxError
from .interp import ExecutionTrace, interpret, trace_equal
from .kernel import IMPLEMENTATION as KERNEL_IMPLEMENTATION
from .kernel import levenshtein, tokenize
from .nodes import Node, Span
from .parser import parse

__all__ = [
    "ExecutionTrace",
    "InvalidProgramError",
    "KERNEL_IMPLEMENTATION",
    "MiniLangError",
    "Node",
    "Op",
    "OpcodeProgram",
    "ScriptSyntaxError",
    "Span",
    "canonical_json",
    "compile_ast",
    "interpret",
    "levenshtein",
    "parse",
    "tokenize",
    "trace_equal",
]
