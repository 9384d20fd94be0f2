"""Test-side oracles: a random program generator, an independent
tree-walking evaluator, and small source mutators.

The tree walker deliberately re-states the language semantics instead of
reusing the compiler or the stack machine, so compiler/interpreter bugs
cannot cancel out.
"""

from __future__ import annotations

import random

from scriptmorph.minilang import parse

WORDS = ["alpha", "bravo", "cargo", "delta", "echo1", "fox trot", "golf", "hotel"]
VARS = ["a", "b", "c", "d", "e"]


# --- random program source ----------------------------------------------


def _gen_string(rng: random.Random) -> str:
    value = rng.choice(WORDS)
    if rng.random() < 0.2:
        value += rng.choice(['\\"', "\\\\"])  # escaped quote or backslash
    return f'"{value}"'


def _gen_expr(rng: random.Random, depth: int = 0) -> str:
    choices = ["num", "str", "var"]
    if depth < 2:
        choices += ["binop", "call", "paren"]
    kind = rng.choice(choices)
    if kind == "num":
        return str(rng.randrange(0, 21))
    if kind == "str":
        return _gen_string(rng)
    if kind == "var":
        return "$" + rng.choice(VARS)
    if kind == "paren":
        return "(" + _gen_expr(rng, depth + 1) + ")"
    if kind == "call":
        fn = rng.choice(["upper", "lower", "rev", "len", "mystery_fn"])
        argc = 1 if fn != "mystery_fn" else rng.randrange(0, 3)
        args = ", ".join(_gen_expr(rng, depth + 1) for _ in range(argc))
        return f"{fn}({args})"
    op = rng.choice([".", "+", "-", "*", "==", "!=", "<", ">"])
    return f"{_gen_expr(rng, depth + 1)} {op} {_gen_expr(rng, depth + 1)}"


def _gen_stmt(rng: random.Random, depth: int = 0) -> str:
    kind = rng.choice(["assign", "assign", "echo", "echo", "if", "expr"])
    if kind == "assign":
        return f"${rng.choice(VARS)} = {_gen_expr(rng)};"
    if kind == "echo":
        args = ", ".join(_gen_expr(rng) for _ in range(rng.randrange(1, 3)))
        return f"echo {args};"
    if kind == "if" and depth < 2:
        cond = _gen_expr(rng)
        then = " ".join(_gen_stmt(rng, depth + 1) for _ in range(rng.randrange(1, 3)))
        if rng.random() < 0.5:
            other = " ".join(_gen_stmt(rng, depth + 1) for _ in range(rng.randrange(1, 3)))
            return f"if ({cond}) {{ {then} }} else {{ {other} }}"
        return f"if ({cond}) {{ {then} }}"
    return f"{_gen_expr(rng)};"


def gen_program(rng: random.Random, max_stmts: int = 6) -> str:
    count = rng.randrange(1, max_stmts + 1)
    source = "\n".join(_gen_stmt(rng) for _ in range(count))
    parse(source)  # generator output must always be well-formed
    return source


# --- independent semantics ------------------------------------------------


def _o_str(v):
    return v if isinstance(v, str) else str(v)


def _o_int(v):
    if isinstance(v, int):
        return v
    s = v.strip()
    neg = s.startswith("-")
    body = s[1:] if neg else s
    if body and body.isascii() and body.isdigit():
        return -int(body) if neg else int(body)
    return 0


def _o_truthy(v):
    return v != 0 if isinstance(v, int) else v != ""


def tree_eval(source: str) -> tuple[str, tuple]:
    """Direct AST-walking evaluation; returns (output, calls)."""
    ast = parse(source)
    env = {}
    out = []
    calls = []

    def ev(node):
        kind = node.kind
        if kind == "NumLit":
            return int(node.name)
        if kind == "StrLit":
            return node.name
        if kind == "Var":
            return env.get(node.name, "")
        if kind == "BinOp":
            a = ev(node.children[0])
            b = ev(node.children[1])
            op = node.name
            if op == ".":
                return _o_str(a) + _o_str(b)
            if op == "+":
                return _o_int(a) + _o_int(b)
            if op == "-":
                return _o_int(a) - _o_int(b)
            if op == "*":
                return _o_int(a) * _o_int(b)
            if op == "==":
                return 1 if type(a) is type(b) and a == b else 0
            if op == "!=":
                return 0 if type(a) is type(b) and a == b else 1
            if op == "<":
                if isinstance(a, str) and isinstance(b, str):
                    return 1 if a < b else 0
                return 1 if _o_int(a) < _o_int(b) else 0
            if op == ">":
                if isinstance(a, str) and isinstance(b, str):
                    return 1 if a > b else 0
                return 1 if _o_int(a) > _o_int(b) else 0
            raise AssertionError(op)
        if kind == "Call":
            args = [ev(c) for c in node.children]
            name = node.name
            if name == "upper":
                return _o_str(args[0]).upper()
            if name == "lower":
                return _o_str(args[0]).lower()
            if name == "rev":
                return _o_str(args[0])[::-1]
            if name == "len":
                return len(_o_str(args[0]))
            if name == "substr":
                s = _o_str(args[0])
                start = _o_int(args[1])
                i = start if start >= 0 else max(0, len(s) + start)
                if len(args) == 2:
                    return s[i:]
                length = _o_int(args[2])
                return "" if length < 0 else s[i : i + length]
            calls.append((name, tuple(args)))
            return ""
        raise AssertionError(kind)

    def run(node):
        kind = node.kind
        if kind == "Assign":
            env[node.children[0].name] = ev(node.children[1])
        elif kind == "Echo":
            for child in node.children:
                out.append(_o_str(ev(child)))
        elif kind == "If":
            if _o_truthy(ev(node.children[0])):
                run(node.children[1])
            elif len(node.children) == 3:
                run(node.children[2])
        elif kind in ("Block", "Program"):
            for child in node.children:
                run(child)
        else:
            ev(node)

    run(ast)
    return "".join(out), tuple(calls)


# --- mutators --------------------------------------------------------------


def sprinkle_comments(source: str, rng: random.Random) -> str:
    """Insert random comments and whitespace at line boundaries."""
    lines = source.split("\n")
    result = []
    for line in lines:
        if rng.random() < 0.4:
            result.append(f"// chatter {rng.randrange(1000)}")
        result.append(line + ("  " if rng.random() < 0.3 else ""))
        if rng.random() < 0.3:
            result.append(f"/* block {rng.randrange(1000)} */")
        if rng.random() < 0.2:
            result.append("")
    return "\n".join(result)


def independent_rename(source: str, mapping: dict[str, str]) -> str:
    """Token-splice variable renaming, written apart from the package's
    own rewriters."""
    from scriptmorph.minilang import tokenize

    out = source
    for tok in sorted(tokenize(source), key=lambda t: -t[4]):
        if tok[0] == "var" and tok[1] in mapping:
            out = out[: tok[4]] + "$" + mapping[tok[1]] + out[tok[5] :]
    return out


# --- search-side oracles ----------------------------------------------------


def mock_variants(module_id: str, code: str, header_seed: int, p: int) -> list[str]:
    """Re-derivation of the offline provider's variant construction, stated
    independently of the provider code (shared contract: seeded transform,
    then a comment salt on collisions)."""
    from scriptmorph.seeding import derive_seed
    from scriptmorph.transforms import apply_transform

    variants = []
    for i in range(p):
        rng = random.Random(derive_seed(header_seed, module_id, i))
        out = apply_transform(module_id, code, rng)
        if out in variants or out == code:
            out = out + f"\n// alt {i} {rng.randrange(1000, 10000)}"
        variants.append(out)
    return variants


def mock_vote_pick(entries: list[str], originals: list[str]) -> int:
    """The documented vote heuristic: farthest (min edit distance to any
    worked-example original) wins, ties to the lowest index."""
    from scriptmorph.minilang import levenshtein

    def score(entry):
        entry = entry[:1000]
        if not originals:
            return len(entry)
        return min(levenshtein(entry, orig[:1000]) for orig in originals)

    scores = [score(e) for e in entries]
    return max(range(len(entries)), key=lambda i: (scores[i], -i))


def two_layer_paths(x: str, schedule, registry, campaign_seed: int, p: int):
    """Exhaustively construct every leaf of a depth-2 campaign and apply
    the layer-wise vote rule.  Returns (layer1, leaves, winner_code)."""
    from scriptmorph.seeding import derive_seed

    m1, m2 = schedule
    layer1 = mock_variants(m1, x, derive_seed(campaign_seed, "generate", 1, 0), p)
    seed2 = derive_seed(campaign_seed, "generate", 2, 0)
    leaves = {i: mock_variants(m2, v, seed2, p) for i, v in enumerate(layer1)}
    originals1 = [n.original for n in registry.get(m1).fe_chain]
    originals2 = [n.original for n in registry.get(m2).fe_chain]
    i_star = mock_vote_pick(layer1, originals1)
    j_star = mock_vote_pick(leaves[i_star], originals2)
    return layer1, leaves, leaves[i_star][j_star]


def audit_memory_scope(campaign_dir) -> list[str]:
    """Scan a campaign's event log for stale candidate code: no request at
    layer n may embed code from layers < n-1 (the input counts as layer 0)."""
    import json
    from pathlib import Path

    from scriptmorph.promptfmt import find_fenced_blocks

    campaign_dir = Path(campaign_dir)
    tree = json.loads((campaign_dir / "tree.json").read_text(encoding="utf-8"))
    campaign = json.loads((campaign_dir / "campaign.json").read_text(encoding="utf-8"))
    code_layer: dict[str, int] = {campaign["input_text"]: 0}
    for cand in tree["candidates"]:
        code_layer.setdefault(cand["code"], cand["layer"])
    violations = []
    with open(campaign_dir / "events.jsonl", encoding="utf-8") as fh:
        for line in fh:
            record = json.loads(line)
            layer = record.get("meta", {}).get("layer")
            if layer is None:
                continue
            for fence in find_fenced_blocks(record["request"]["user_text"]):
                owner = code_layer.get(fence)
                if owner is not None and owner < layer - 1:
                    violations.append(
                        f"request {record['request_id']} at layer {layer} embeds "
                        f"layer-{owner} code"
                    )
    return violations
