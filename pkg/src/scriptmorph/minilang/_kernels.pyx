# cython: language_level=3
"""Compiled twin of kernels_py: tokenizer, stack-machine loop, edit distance.

Behaviour must stay byte-identical to the pure-Python kernels; the parity
tests compare the two directly.  Keep any semantic change in both files.
"""

from .errors import ScriptSyntaxError
from .opcodes import BUILTIN_ARITY

IMPLEMENTATION = "c"

KEYWORDS = {"echo", "if", "else"}

cdef str _PUNCT_ONE = "=;,(){}.+-*/<>"


cdef inline bint _ident_start(Py_UCS4 ch):
    return ch == u'_' or (u'a' <= ch <= u'z') or (u'A' <= ch <= u'Z')


cdef inline bint _ident_cont(Py_UCS4 ch):
    return ch == u'_' or (u'a' <= ch <= u'z') or (u'A' <= ch <= u'Z') or (u'0' <= ch <= u'9')


def tokenize(str source):
    """Scan ``source`` into a token list; see kernels_py.tokenize."""
    cdef list tokens = []
    cdef Py_ssize_t i = 0, j, start
    cdef Py_ssize_t n = len(source)
    cdef int line = 1, col = 1, sline, scol
    cdef Py_UCS4 ch, c, esc
    cdef str two, word, text
    cdef list parts

    while i < n:
        ch = source[i]
        if ch == u'\n':
            i += 1
            line += 1
            col = 1
            continue
        if ch == u' ' or ch == u'\t' or ch == u'\r':
            i += 1
            col += 1
            continue
        if ch == u'/' and i + 1 < n and source[i + 1] == u'/':
            while i < n and source[i] != u'\n':
                i += 1
                col += 1
            continue
        if ch == u'#':
            while i < n and source[i] != u'\n':
                i += 1
                col += 1
            continue
        if ch == u'/' and i + 1 < n and source[i + 1] == u'*':
            sline = line
            scol = col
            i += 2
            col += 2
            while True:
                if i >= n:
                    raise ScriptSyntaxError("unterminated block comment", sline, scol)
                if source[i] == u'*' and i + 1 < n and source[i + 1] == u'/':
                    i += 2
                    col += 2
                    break
                if source[i] == u'\n':
                    line += 1
                    col = 1
                else:
                    col += 1
                i += 1
            continue
        start = i
        sline = line
        scol = col
        if ch == u'$':
            i += 1
            col += 1
            if i >= n or not _ident_start(source[i]):
                raise ScriptSyntaxError("'$' must be followed by an identifier", sline, scol)
            j = i
            while j < n and _ident_cont(source[j]):
                j += 1
            word = source[i:j]
            col += <int> (j - i)
            i = j
            tokens.append(("var", word, sline, scol, start, i))
            continue
        if _ident_start(ch):
            j = i
            while j < n and _ident_cont(source[j]):
                j += 1
            word = source[i:j]
            col += <int> (j - i)
            i = j
            tokens.append((word if word in KEYWORDS else "ident", word, sline, scol, start, i))
            continue
        if u'0' <= ch <= u'9':
            j = i
            while j < n and u'0' <= source[j] <= u'9':
                j += 1
            text = source[i:j]
            col += <int> (j - i)
            i = j
            tokens.append(("number", text, sline, scol, start, i))
            continue
        if ch == u'"':
            i += 1
            col += 1
            parts = []
            while True:
                if i >= n:
                    raise ScriptSyntaxError("unterminated string literal", sline, scol)
                c = source[i]
                if c == u'\n':
                    raise ScriptSyntaxError("unterminated string literal", sline, scol)
                if c == u'"':
                    i += 1
                    col += 1
                    break
                if c == u'\\':
                    if i + 1 >= n:
                        raise ScriptSyntaxError("unterminated string literal", sline, scol)
                    esc = source[i + 1]
                    if esc == u'"' or esc == u'\\':
                        parts.append(chr(esc))
                        i += 2
                        col += 2
                        continue
                    raise ScriptSyntaxError(
                        f"invalid escape sequence '\\{chr(esc)}'", line, col
                    )
                parts.append(chr(c))
                i += 1
                col += 1
            tokens.append(("string", "".join(parts), sline, scol, start, i))
            continue
        if i + 1 < n:
            two = source[i:i + 2]
            if two == "==" or two == "!=":
                i += 2
                col += 2
                tokens.append((two, two, sline, scol, start, i))
                continue
        if _PUNCT_ONE.find(ch) >= 0:
            i += 1
            col += 1
            word = chr(ch)
            tokens.append((word, word, sline, scol, start, i))
            continue
        raise ScriptSyntaxError(f"unexpected character {chr(ch)!r}", line, col)
    return tokens


# --- stack machine -----------------------------------------------------

cdef enum:
    _ASSIGN = 0
    _FETCH_CONST = 1
    _FETCH_VAR = 2
    _CONCAT = 3
    _ADD = 4
    _SUB = 5
    _MUL = 6
    _DIV = 7
    _CMP_EQ = 8
    _CMP_NE = 9
    _CMP_LT = 10
    _CMP_GT = 11
    _JMP = 12
    _JMPZ = 13
    _ECHO = 14
    _INIT_CALL = 15
    _SEND_ARG = 16
    _DO_CALL = 17
    _RETURN = 18


cdef inline str _to_str(object v):
    return v if isinstance(v, str) else str(v)


cdef object _to_int(object v):
    if isinstance(v, int):
        return v
    cdef str s = (<str> v).strip()
    cdef bint neg = s.startswith("-")
    if neg:
        s = s[1:]
    if s and s.isascii() and s.isdigit():
        return -int(s) if neg else int(s)
    return 0


cdef inline bint _truthy(object v):
    if isinstance(v, int):
        return v != 0
    return v != ""


cdef object _trunc_div(object a, object b):
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


cdef str _substr(str s, object start, object length):
    cdef Py_ssize_t m = len(s)
    cdef Py_ssize_t i = start if start >= 0 else max(0, m + start)
    if length is None:
        return s[i:]
    if length < 0:
        return ""
    return s[i:i + length]


def run_ops(list codes, list operands, Py_ssize_t nslots, long long step_limit):
    """Execute a lowered program; see kernels_py.run_ops for the contract."""
    cdef list stack = []
    cdef list slots = [""] * nslots
    cdef list out = []
    cdef list calls = []
    cdef list frames = []
    cdef Py_ssize_t nops = len(codes)
    cdef Py_ssize_t ip = 0
    cdef long long steps = 0
    cdef int op
    cdef object arg, a, b, name, args, s, length
    cdef tuple frame
    cdef Py_ssize_t lo, hi

    while ip < nops:
        if steps >= step_limit:
            return "".join(out), calls, steps, "step-limit", None
        op = <int> codes[ip]
        arg = operands[ip]
        steps += 1
        if op == _FETCH_CONST:
            stack.append(arg)
        elif op == _FETCH_VAR:
            stack.append(slots[<Py_ssize_t> arg])
        elif op == _ASSIGN:
            slots[<Py_ssize_t> arg] = stack.pop()
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
                stack.append(1 if (<str> a) < (<str> b) else 0)
            else:
                stack.append(1 if _to_int(a) < _to_int(b) else 0)
        elif op == _CMP_GT:
            b = stack.pop()
            a = stack.pop()
            if isinstance(a, str) and isinstance(b, str):
                stack.append(1 if (<str> a) > (<str> b) else 0)
            else:
                stack.append(1 if _to_int(a) > _to_int(b) else 0)
        elif op == _JMP:
            ip = <Py_ssize_t> arg
            continue
        elif op == _JMPZ:
            if not _truthy(stack.pop()):
                ip = <Py_ssize_t> arg
                continue
        elif op == _ECHO:
            out.append(_to_str(stack.pop()))
        elif op == _INIT_CALL:
            frames.append((arg, []))
        elif op == _SEND_ARG:
            frame = <tuple> frames[len(frames) - 1]
            (<list> frame[1]).append(stack.pop())
        elif op == _DO_CALL:
            frame = <tuple> frames.pop()
            name = frame[0]
            args = frame[1]
            arity = BUILTIN_ARITY.get(name)
            if arity is None:
                calls.append((name, tuple(args)))
                stack.append("")
            else:
                lo = (<tuple> arity)[0]
                hi = (<tuple> arity)[1]
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
                    stack.append(_substr(<str> s, start, length))
        elif op == _RETURN:
            return "".join(out), calls, steps, "done", None
        ip += 1
    return "".join(out), calls, steps, "done", None


def levenshtein(str a, str b):
    """Exact Levenshtein distance between two strings."""
    if a == b:
        return 0
    cdef Py_ssize_t la = len(a)
    cdef Py_ssize_t lb = len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    cdef list prev = list(range(lb + 1))
    cdef list cur = [0] * (lb + 1)
    cdef list tmp
    cdef Py_ssize_t i, j
    cdef long x, y, z, cost
    cdef Py_UCS4 ca
    for i in range(1, la + 1):
        cur[0] = i
        ca = a[i - 1]
        for j in range(1, lb + 1):
            cost = 0 if ca == b[j - 1] else 1
            x = <long> prev[j] + 1
            y = <long> cur[j - 1] + 1
            z = <long> prev[j - 1] + cost
            if y < x:
                x = y
            if z < x:
                x = z
            cur[j] = x
        tmp = prev
        prev = cur
        cur = tmp
    return prev[lb]
