"""Benign reference rewrites of mini-language source, one per strategy module.

These are the deterministic stand-ins the offline mock provider applies when
asked to "generate": each takes the source text and a seeded RNG and returns
a rewritten source.  All of them preserve parseability; all except
``xor-like-encode`` also preserve runtime behaviour (the xor rewrite routes
string literals through an unknown decoder call on purpose, to exercise the
survival metric).

Rewrites are token-splice based: they locate sites with the real tokenizer
and edit the raw text between token offsets, so string-literal contents are
never confused with code.
"""

from __future__ import annotations

import random
from typing import Callable, Dict

from .minilang import MiniLangError, tokenize

_WORDS = (
    "aurora", "basalt", "cedar", "delta", "ember", "fjord", "garnet",
    "harbor", "indigo", "juniper", "krill", "lagoon", "meadow", "nimbus",
    "opal", "prairie", "quartz", "reed", "sable", "tundra",
)


def _pick_word(rng: random.Random) -> str:
    return rng.choice(_WORDS)


def _escape(value: str) -> str:
    return value.replace("\\", "\\\\").replace('"', '\\"')


def _quote(value: str) -> str:
    return '"' + _escape(value) + '"'


def _splice(code: str, edits: list[tuple[int, int, str]]) -> str:
    """Apply (start, end, replacement) edits; offsets refer to the input."""
    out = code
    for start, end, text in sorted(edits, reverse=True):
        out = out[:start] + text + out[end:]
    return out


def _fresh_name(tokens, rng: random.Random, prefix: str) -> str:
    taken = {t[1] for t in tokens if t[0] == "var"}
    while True:
        name = f"{prefix}_{_pick_word(rng)}{rng.randrange(10, 100)}"
        if name not in taken:
            return name


def comment_insert(code: str, rng: random.Random) -> str:
    """Insert one unrelated comment line at a seeded line boundary."""
    lines = code.split("\n")
    at = rng.randrange(0, len(lines) + 1)
    note = f"// note: {_pick_word(rng)} {_pick_word(rng)} {rng.randrange(100, 1000)}"
    return "\n".join(lines[:at] + [note] + lines[at:])


def comment_noise(code: str, rng: random.Random) -> str:
    """Drop an inline block comment between two seeded tokens."""
    tokens = tokenize(code)
    if not tokens:
        return comment_insert(code, rng)
    tok = tokens[rng.randrange(len(tokens))]
    filler = f"/* {_pick_word(rng)}{rng.randrange(10, 100)} */"
    return _splice(code, [(tok[5], tok[5], " " + filler)])


def comment_banner(code: str, rng: random.Random) -> str:
    """Prepend a multi-line banner comment."""
    rows = [f" * {_pick_word(rng)} {_pick_word(rng)}" for _ in range(rng.randrange(2, 5))]
    return "/*\n" + "\n".join(rows) + f"\n * rev {rng.randrange(1000, 10000)}\n */\n" + code


def rename_vars(code: str, rng: random.Random) -> str:
    """Consistently rename every variable to a seeded fresh name."""
    tokens = tokenize(code)
    order = []
    for tok in tokens:
        if tok[0] == "var" and tok[1] not in order:
            order.append(tok[1])
    if not order:
        return code
    taken = set(order)
    mapping = {}
    for name in order:
        while True:
            candidate = f"{_pick_word(rng)}{rng.randrange(10, 100)}"
            if candidate not in taken:
                break
        taken.add(candidate)
        mapping[name] = candidate
    edits = [
        (tok[4], tok[5], "$" + mapping[tok[1]]) for tok in tokens if tok[0] == "var"
    ]
    return _splice(code, edits)


def _cut_points(length: int, rng: random.Random) -> list[int]:
    """Cut positions for shredding a literal: roughly one cut per six
    characters, so long literals shatter into many pieces."""
    pieces = max(2, -(-length // 6))
    cuts = sorted(rng.sample(range(1, length), min(pieces - 1, length - 1)))
    return cuts


def _pieces(value: str, rng: random.Random) -> list[str]:
    cuts = [0] + _cut_points(len(value), rng) + [len(value)]
    return [value[a:b] for a, b in zip(cuts, cuts[1:])]


def string_split(code: str, rng: random.Random) -> str:
    """Shred string literals into parenthesized concatenations.

    Each literal of length >= 2 is shredded with probability 0.35; the
    number of pieces grows with literal length, so rewriting a long
    literal visibly outweighs rewriting a short one.
    """
    tokens = tokenize(code)
    edits = []
    for tok in tokens:
        if tok[0] != "string" or len(tok[1]) < 2:
            continue
        if rng.random() < 0.35:
            joined = " . ".join(_quote(p) for p in _pieces(tok[1], rng))
            edits.append((tok[4], tok[5], f"({joined})"))
    if not edits:
        return code
    return _splice(code, edits)


def rev_wrap(code: str, rng: random.Random) -> str:
    """Store string literals as reversed pieces restored through rev()."""
    tokens = tokenize(code)
    edits = []
    for tok in tokens:
        if tok[0] != "string" or len(tok[1]) < 2:
            continue
        if rng.random() < 0.35:
            joined = " . ".join(f"rev({_quote(p[::-1])})" for p in _pieces(tok[1], rng))
            edits.append((tok[4], tok[5], f"({joined})"))
    if not edits:
        return code
    return _splice(code, edits)


def echo_split(code: str, rng: random.Random) -> str:
    """Split one multi-argument echo statement into consecutive echoes."""
    tokens = tokenize(code)
    candidates = []
    i = 0
    while i < len(tokens):
        if tokens[i][0] == "echo":
            depth = 0
            commas = []
            j = i + 1
            while j < len(tokens):
                kind = tokens[j][0]
                if kind == "(":
                    depth += 1
                elif kind == ")":
                    depth -= 1
                elif kind == "," and depth == 0:
                    commas.append(j)
                elif kind == ";" and depth == 0:
                    break
                j += 1
            if commas and j < len(tokens):
                candidates.append(commas)
            i = j
        i += 1
    if not candidates:
        return code
    commas = candidates[rng.randrange(len(candidates))]
    edits = [(tokens[j][4], tokens[j][5], "; echo ") for j in commas]
    return _splice(code, edits)


def dead_store(code: str, rng: random.Random) -> str:
    """Insert an assignment to a fresh, never-read variable."""
    tokens = tokenize(code)
    name = _fresh_name(tokens, rng, "pad")
    stmt = f"${name} = {rng.randrange(1, 100)};"
    boundaries = [0]
    for i, tok in enumerate(tokens):
        if tok[0] == ";":
            boundaries.append(tok[5])
        elif tok[0] == "}":
            # a statement may not sit between a block and its else branch
            if i + 1 >= len(tokens) or tokens[i + 1][0] != "else":
                boundaries.append(tok[5])
    at = boundaries[rng.randrange(len(boundaries))]
    return _splice(code, [(at, at, (" " if at else "") + stmt + ("" if at else " "))])


def int_unfold(code: str, rng: random.Random) -> str:
    """Rewrite integer literals as parenthesized sums."""
    tokens = tokenize(code)
    edits = []
    for tok in tokens:
        if tok[0] != "number":
            continue
        if rng.random() < 0.5:
            value = int(tok[1])
            part = rng.randrange(0, value + 1)
            edits.append((tok[4], tok[5], f"({part} + {value - part})"))
    if not edits:
        return code
    return _splice(code, edits)


def var_chain(code: str, rng: random.Random) -> str:
    """Route one assignment through a fresh intermediate variable."""
    tokens = tokenize(code)
    sites = []
    for i, tok in enumerate(tokens):
        if tok[0] != "var" or i + 1 >= len(tokens) or tokens[i + 1][0] != "=":
            continue
        depth = 0
        j = i + 2
        while j < len(tokens):
            kind = tokens[j][0]
            if kind == "(":
                depth += 1
            elif kind == ")":
                depth -= 1
            elif kind == ";" and depth == 0:
                sites.append((i, j))
                break
            j += 1
    if not sites:
        return code
    i, j = sites[rng.randrange(len(sites))]
    name = _fresh_name(tokens, rng, "h")
    target = tokens[i]
    expr = code[tokens[i + 2][4] : tokens[j][4]].rstrip()
    replacement = f"${name} = {expr}; ${target[1]} = ${name};"
    return _splice(code, [(target[4], tokens[j][5], replacement)])


def symbol_noise(code: str, rng: random.Random) -> str:
    """Wrap seeded value tokens in redundant parentheses."""
    tokens = tokenize(code)
    edits = []
    for i, tok in enumerate(tokens):
        if tok[0] == "var" and i + 1 < len(tokens) and tokens[i + 1][0] == "=":
            continue  # assignment target: grammar forbids parens there
        if tok[0] in ("var", "number", "string") and rng.random() < 0.3:
            edits.append((tok[4], tok[4], "("))
            edits.append((tok[5], tok[5], ")"))
    if not edits:
        return comment_noise(code, rng)
    return _splice(code, edits)


def xor_encode(code: str, rng: random.Random) -> str:
    """Hex/xor-encode string literals behind an external decoder call.

    The decoder is not a builtin, so the rewritten script trades runtime
    behaviour for an unreadable surface; schedules treat this module as
    readability-destroying.
    """
    tokens = tokenize(code)
    key = rng.randrange(1, 256)
    edits = []
    for tok in tokens:
        if tok[0] != "string" or not tok[1]:
            continue
        encoded = "".join(f"{b ^ key:02x}" for b in tok[1].encode("utf-8"))
        edits.append((tok[4], tok[5], f'xdec("{encoded}", {key})'))
    if not edits:
        return code
    return _splice(code, edits)


Transform = Callable[[str, random.Random], str]

TRANSFORMS: Dict[str, Transform] = {
    "comment-insert": comment_insert,
    "comment-noise": comment_noise,
    "comment-banner": comment_banner,
    "rename-vars": rename_vars,
    "string-split": string_split,
    "rev-wrap": rev_wrap,
    "echo-split": echo_split,
    "dead-store": dead_store,
    "int-unfold": int_unfold,
    "var-chain": var_chain,
    "symbol-noise": symbol_noise,
    "xor-like-encode": xor_encode,
}


def apply_transform(module_id: str, code: str, rng: random.Random) -> str:
    """Apply the module's rewrite; fall back to a comment line if the
    source does not tokenize (the engine itself is content-agnostic)."""
    fn = TRANSFORMS.get(module_id)
    if fn is None:
        raise KeyError(f"no reference transform for module {module_id!r}")
    try:
        return fn(code, rng)
    except MiniLangError:
        return comment_insert(code, rng)
