"""Benchmark the compiled kernels against the pure-Python fallback.

Times the three hot paths (tokenizer, stack-machine loop, edit distance)
on synthetic workloads and prints one table.  Runs fine when the extension
is absent; the compiled column then reads n/a.

    python benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import random
import time

from scriptmorph.minilang import kernels_py
from scriptmorph.minilang.opcodes import CODE_OF

try:
    from scriptmorph.minilang import _kernels
except ImportError:
    _kernels = None


def build_source(blocks: int) -> str:
    rng = random.Random(9)
    lines = []
    for i in range(blocks):
        lines.append(f'$v{i} = "payload piece {i} {"x" * (i % 17)}";')
        lines.append(f"echo upper($v{i}), rev($v{i});")
        lines.append(f"if ($v{i} == \"probe\") {{ echo {i}; }} else {{ echo len($v{i}); }}")
        if rng.random() < 0.4:
            lines.append(f"// filler comment {i}")
    return "\n".join(lines)


def build_loop_program(iterations: int):
    """Counting loop, hand-assembled: slot0 counts down to zero."""
    from scriptmorph.minilang import Op, OpcodeProgram

    ops = (
        Op("FETCH_CONST", iterations),
        Op("ASSIGN", 0),
        # top of loop at index 2
        Op("FETCH_VAR", 0),
        Op("JMPZ", 9),
        Op("FETCH_VAR", 0),
        Op("FETCH_CONST", 1),
        Op("SUB"),
        Op("ASSIGN", 0),
        Op("JMP", 2),
        Op("RETURN"),
    )
    program = OpcodeProgram(ops=ops, slot_map={"n": 0})
    codes = [CODE_OF[op.mnemonic] for op in program.ops]
    operands = [op.operand for op in program.ops]
    return codes, operands, program.nslots


def timed(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--repeat", type=int, default=5, help="best-of repetitions")
    args = parser.parse_args()

    source = build_source(400)
    codes, operands, nslots = build_loop_program(60_000)
    rng = random.Random(4)
    words = [
        "".join(rng.choice("abcdefgh (){};$=") for _ in range(400)) for _ in range(40)
    ]
    pairs = list(zip(words[:20], words[20:]))

    workloads = {
        f"tokenize ({len(source):,} chars)": lambda k: k.tokenize(source),
        "run_ops (240k steps)": lambda k: k.run_ops(codes, operands, nslots, 10**9),
        "levenshtein (20 pairs x 400 chars)": lambda k: [
            k.levenshtein(a, b) for a, b in pairs
        ],
    }

    print(f"{'workload':38} {'python':>10} {'compiled':>10} {'speedup':>8}")
    for label, work in workloads.items():
        py = timed(lambda: work(kernels_py), args.repeat)
        if _kernels is not None:
            cy = timed(lambda: work(_kernels), args.repeat)
            print(f"{label:38} {py * 1e3:9.2f}ms {cy * 1e3:9.2f}ms {py / cy:7.1f}x")
        else:
            print(f"{label:38} {py * 1e3:9.2f}ms {'n/a':>10} {'-':>8}")

    # sanity: both kernels agree on the benchmark inputs themselves
    if _kernels is not None:
        assert _kernels.tokenize(source) == kernels_py.tokenize(source)
        assert _kernels.run_ops(codes, operands, nslots, 10**9) == kernels_py.run_ops(
            codes, operands, nslots, 10**9
        )
        assert [(a, b, _kernels.levenshtein(a, b)) for a, b in pairs] == [
            (a, b, kernels_py.levenshtein(a, b)) for a, b in pairs
        ]
        print("cross-check: kernels agree on all benchmark inputs")


if __name__ == "__main__":
    main()
