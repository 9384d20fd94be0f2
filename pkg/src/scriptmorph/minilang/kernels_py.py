"""Pure-Python execution kernels: tokenizer, stack-machine loop, edit distance.

This module is the reference implementation of the three hot kernels.  The
compiled twin in ``_kernels.pyx`` mirrors it operation for operation; the
parity test suite holds the two to byte-identical behaviour.  Which one is
active is decided once, in :mod:`scriptmorph.minilang.kernel`.

Tokens are plain tuples ``(kind, value, line, col, start, end)`` where
``start``/``end`` are absolute character offsets into the source (used by
the source-splicing rewriters) and ``value`` is the decoded text for string
literals.
"""

from .errors import ScriptSyntaxError
from .opcodes import BUILTIN_ARITY

IMPLEMENTATION = "python"

KEYWORDS = {"echo", "if", "else"}

_PUNCT_TWO = ("==", "!=")
_PUNCT_ONE = "=;,(){}" + ".+-*/<>"


def _ident_start(ch):
    return ch.isascii() and (ch.isalpha() or ch == "_")


def _ident_cont(ch):
    return ch.isascii() and (ch.isalnum() or ch == "_")


def tokenize(source):
    """Scan ``source`` into a token list.

    Comments (``//``, ``#``, ``/* */``) and whitespace are discarded.
    Raises :class:`ScriptSyntaxError` on malformed input.
    """
    tokens = []
    i = 0
    n = len(source)
    line = 1
    col = 1

    def err(message, eline=None, ecol=None):
        raise ScriptSyntaxError(message, eline or line, ecol or col)

    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "/" and i + 1 < n and source[i + 1] == "/":
            while i < n and source[i] != "\n":
                i += 1
                col += 1
            continue
        if ch == "#":
            while i < n and source[i] != "\n":
                i += 1
                col += 1
            continue
        if ch == "/" and i + 1 < n and source[i + 1] == "*":
            sline, scol = line, col
            i += 2
            col += 2
            while True:
                if i >= n:
                    err("unterminated block comment", sline, scol)
                if source[i] == "*" and i + 1 < n and source[i + 1] == "/":
                    i += 2
                    col += 2
                    break
                if source[i] == "\n":
                    line += 1
                    col = 1
                else:
                    col += 1
                i += 1
            continue
        start = i
        sline, scol = line, col
        if ch == "$":
            i += 1
            col += 1
            if i >= n or not _ident_start(source[i]):
                err("'$' must be followed by an identifier", sline, scol)
            j = i
            while j < n and _ident_cont(source[j]):
                j += 1
            name = source[i:j]
            col += j - i
            i = j
            tokens.append(("var", name, sline, scol, start, i))
            continue
        if _ident_start(ch):
            j = i
            while j < n and _ident_cont(source[j]):
                j += 1
            word = source[i:j]
            col += j - i
            i = j
            kind = word if word in KEYWORDS else "ident"
            tokens.append((kind, word, sline, scol, start, i))
            continue
        if ch.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            text = source[i:j]
            col += j - i
            i = j
            tokens.append(("number", text, sline, scol, start, i))
            continue
        if ch == '"':
            i += 1
            col += 1
            parts = []
            while True:
                if i >= n:
                    err("unterminated string literal", sline, scol)
                c = source[i]
                if c == "\n":
                    err("unterminated string literal", sline, scol)
                if c == '"':
                    i += 1
                    col += 1
                    break
                if c == "\\":
                    if i + 1 >= n:
                        err("unterminated string literal", sline, scol)
                    esc = source[i + 1]
                    if esc == '"' or esc == "\\":
                        parts.append(esc)
                        i += 2
                        col += 2
                        continue
                    err(f"invalid escape sequence '\\{esc}'", line, col)
                parts.append(c)
                i += 1
                col += 1
            tokens.append(("string", "".join(parts), sline, scol, start, i))
            continue
        two = source[i : i + 2]
        if two in _PUNCT_TWO:
            i += 2
            col += 2
            tokens.append((two, two, sline, scol, start, i))
            continue
        if ch in _PUNCT_ONE:
            i += 1
            col += 1
            tokens.append((ch, ch, sline, scol, start, i))
            continue
        err(f"unexpected character {ch!r}")
    return tokens


# --- stack machine -----------------------------------------------------

# Opcode integers, kept in sync with opcodes.MNEMONICS order.
(
    _ASSIGN,
    _FETCH_CONST,
    _FETCH_VAR,
    _CONCAT,
    _ADD,
    _SUB,
    _MUL,
    _DIV,
    _CMP_EQ,
    _CMP_NE,
    _CMP_LT,
    _CMP_GT,
    _JMP,
    _JMPZ,
    _ECHO,
    _INIT_CALL,
    _SEND_ARG,
    _DO_CALL,
    _RETURN,
) = range(19)


def _to_str(v):
    return v if isinstance(v, str) else str(v)


def _to_int(v):
    if isinstance(v, int):
        return v
    s = v.strip()
    neg = s.startswith("-")
    if neg:
        s = s[1:]
    if s and s.isascii() and s.isdigit():
        n = int(s)
        return -n if neg else n
    return 0


def _truthy(v):
    if isinstance(v, int):
        return v != 0
    return v != ""


def _trunc_div(a, b):
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def _substr(s, start, length):
    m = len(s)
    i = start if start >= 0 else max(0, m + start)
    if length is None:
        return s[i:]
    if length < 0:
        return ""
    return s[i : i + length]


def run_ops(codes, operands, nslots, step_limit):
    """Execute a lowered program.

    ``codes`` is a list of opcode integers, ``operands`` the per-op operand
    (``None`` where the op takes none).  Returns a tuple
    ``(output, calls, steps, reason, error)`` with ``reason`` one of
    ``done``, ``step-limit`` or ``error``.  The kernel never raises for
    runtime faults; they are reported through the trace so partially
    executed behaviour is still observable.
    """
    stack = []
    slots = [""] * nslots
    out = []
    calls = []
    frames = []
    nops = len(codes)
    ip = 0
    steps = 0
    while ip < nops:
        if steps >= step_limit:
            return "".join(out), calls, steps, "step-limit", None
        op = codes[ip]
        arg = operands[ip]
        steps += 1
        if op == _FETCH_CONST:
            stack.append(arg)
        elif op == _FETCH_VAR:
            stack.append(slots[arg])
        elif op == _ASSIGN:
            slots[arg] = stack.pop()
        elif op == _CONCAT:
            b = stack.pop()
            a = stack.pop()
            stack.append(_to_str(a) + _to_str(b))
        elif op == _ADD:
            b = stack.pop()
            a = stack.pop()
            stack.append(_to_int(a) + _to_int(b))
        elif op == _SUB:
            b = stack.pop()
            a = stack.pop()
            stack.append(_to_int(a) - _to_int(b))
        elif op == _MUL:
            b = stack.pop()
            a = stack.pop()
            stack.append(_to_int(a) * _to_int(b))
        elif op == _DIV:
            b = _to_int(stack.pop())
            a = _to_int(stack.pop())
            if b == 0:
                return "".join(out), calls, steps, "error", "division by zero"
            stack.append(_trunc_div(a, b))
        elif op == _CMP_EQ:
            b = stack.pop()
            a = stack.pop()
            stack.append(1 if (type(a) is type(b) and a == b) else 0)
        elif op == _CMP_NE:
            b = stack.pop()
            a = stack.pop()
            stack.append(0 if (type(a) is type(b) and a == b) else 1)
        elif op == _CMP_LT:
            b = stack.pop()
            a = stack.pop()
            if isinstance(a, str) and isinstance(b, str):
                stack.append(1 if a < b else 0)
            else:
                stack.append(1 if _to_int(a) < _to_int(b) else 0)
        elif op == _CMP_GT:
            b = stack.pop()
            a = stack.pop()
            if isinstance(a, str) and isinstance(b, str):
                stack.append(1 if a > b else 0)
            else:
                stack.append(1 if _to_int(a) > _to_int(b) else 0)
        elif op == _JMP:
            ip = arg
            continue
        elif op == _JMPZ:
            if not _truthy(stack.pop()):
                ip = arg
                continue
        elif op == _ECHO:
            out.append(_to_str(stack.pop()))
        elif op == _INIT_CALL:
            frames.append((arg, []))
        elif op == _SEND_ARG:
            frames[-1][1].append(stack.pop())
        elif op == _DO_CALL:
            name, args = frames.pop()
            arity = BUILTIN_ARITY.get(name)
            if arity is None:
                calls.append((name, tuple(args)))
                stack.append("")
            else:
                lo, hi = arity
                if not lo <= len(args) <= hi:
                    return (
                        "".join(out),
                        calls,
                        steps,
                        "error",
                        f"builtin {name} takes {lo}..{hi} arguments, got {len(args)}",
                    )
                if name == "upper":
                    stack.append(_to_str(args[0]).upper())
                elif name == "lower":
                    stack.append(_to_str(args[0]).lower())
                elif name == "rev":
                    stack.append(_to_str(args[0])[::-1])
                elif name == "len":
                    stack.append(len(_to_str(args[0])))
                else:
                    s = _to_str(args[0])
                    start = _to_int(args[1])
                    length = _to_int(args[2]) if len(args) == 3 else None
                    stack.append(_substr(s, start, length))
        elif op == _RETURN:
            return "".join(out), calls, steps, "done", None
        ip += 1
    return "".join(out), calls, steps, "done", None


def levenshtein(a, b):
    """Exact Levenshtein distance between two strings."""
    if a == b:
        return 0
    la = len(a)
    lb = len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    prev = list(range(lb + 1))
    cur = [0] * (lb + 1)
    for i in range(1, la + 1):
        cur[0] = i
        ca = a[i - 1]
        for j in range(1, lb + 1):
            cost = 0 if ca == b[j - 1] else 1
            x = prev[j] + 1
            y = cur[j - 1] + 1
            z = prev[j - 1] + cost
            if y < x:
                x = y
            if z < x:
                x = z
            cur[j] = x
        prev, cur = cur, prev
    return prev[lb]
