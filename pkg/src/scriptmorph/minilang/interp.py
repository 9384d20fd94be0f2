"""Deterministic execution of opcode programs.

The interpreter is the survival oracle of the pipeline: two scripts behave
the same iff their traces are equal on output and calls.  Builtins
(upper, lower, rev, len, substr) are evaluated; any other function call is
recorded in the trace and yields "".  Runtime faults (division by zero,
builtin arity) halt execution with reason ``error`` rather than raising,
so a trace always comes back.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .compiler import OpcodeProgram
from .kernel import run_ops
from .opcodes import CODE_OF


@dataclass(frozen=True)
class ExecutionTrace:
    output: str
    calls: tuple[tuple[str, tuple], ...]
    steps: int
    halted: str  # done | step-limit | error
    error: Optional[str] = None


def interpret(program: OpcodeProgram, step_limit: int) -> ExecutionTrace:
    if step_limit < 1:
        raise ValueError("step_limit must be >= 1")
    codes = [CODE_OF[op.mnemonic] for op in program.ops]
    operands = [op.operand for op in program.ops]
    output, calls, steps, reason, error = run_ops(
        codes, operands, program.nslots, step_limit
    )
    return ExecutionTrace(
        output=output,
        calls=tuple(calls),
        steps=steps,
        halted=reason,
        error=error,
    )


def trace_equal(t1: ExecutionTrace, t2: ExecutionTrace) -> bool:
    """Behavioural equality: output and call sequence, steps ignored."""
    return t1.output == t2.output and t1.calls == t2.calls
