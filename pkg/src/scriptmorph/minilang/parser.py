"""Recursive-descent parser producing the attributed syntax tree.

Grammar (single precedence tier, left-associative binary operators):

    program  := stmt*
    stmt     := assign ";" | echoStmt ";" | ifStmt | exprStmt ";"
    assign   := VAR "=" expr
    echoStmt := "echo" expr ("," expr)*
    ifStmt   := "if" "(" expr ")" block ("else" block)?
    block    := "{" stmt* "}"
    expr     := prim (BINOP prim)*
    prim     := STRING | NUMBER | VAR | call | "(" expr ")"
    call     := IDENT "(" (expr ("," expr)*)? ")"

Comments never reach the tree.  Numeric literals are stored canonically
(leading zeros dropped); string literals are stored decoded.
"""

from __future__ import annotations

from .errors import ScriptSyntaxError
from .kernel import tokenize
from .nodes import (
    ASSIGN,
    BIN_OP,
    BLOCK,
    CALL,
    ECHO,
    IF,
    NUM_LIT,
    PROGRAM,
    STR_LIT,
    VAR,
    Node,
    Span,
)

BINOPS = frozenset({".", "+", "-", "*", "/", "==", "!=", "<", ">"})

_EXPR_START = ("string", "number", "variable", "identifier", "'('")


class _Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.pos = 0
        lines = source.split("\n")
        self.eof_line = len(lines)
        self.eof_col = len(lines[-1]) + 1

    def peek(self):
        if self.pos < len(self.tokens):
            return self.tokens[self.pos]
        return None

    def next(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def here(self):
        tok = self.peek()
        if tok is None:
            return self.eof_line, self.eof_col
        return tok[2], tok[3]

    def fail(self, expected):
        tok = self.peek()
        line, col = self.here()
        what = "end of input" if tok is None else f"unexpected {tok[0]!r}"
        raise ScriptSyntaxError(what, line, col, expected=expected)

    def expect(self, kind):
        tok = self.peek()
        if tok is None or tok[0] != kind:
            self.fail((f"'{kind}'",))
        return self.next()

    def at(self, kind):
        tok = self.peek()
        return tok is not None and tok[0] == kind

    def span_from(self, tok, end_tok):
        return Span(tok[2], tok[3], end_tok[2], end_tok[3] + (end_tok[5] - end_tok[4]))

    # --- productions ---

    def program(self) -> Node:
        stmts = []
        while self.peek() is not None:
            stmts.append(self.stmt())
        return Node(PROGRAM, children=stmts)

    def stmt(self) -> Node:
        if self.at("if"):
            return self.if_stmt()
        if self.at("echo"):
            node = self.echo_stmt()
            self.expect(";")
            return node
        if self.at("var") and self.pos + 1 < len(self.tokens) and self.tokens[self.pos + 1][0] == "=":
            node = self.assign()
            self.expect(";")
            return node
        node = self.expr()
        self.expect(";")
        return node

    def assign(self) -> Node:
        var_tok = self.expect("var")
        target = Node(VAR, name=var_tok[1], span=self.span_from(var_tok, var_tok))
        self.expect("=")
        value = self.expr()
        return Node(ASSIGN, children=[target, value], span=target.span)

    def echo_stmt(self) -> Node:
        kw = self.expect("echo")
        args = [self.expr()]
        while self.at(","):
            self.next()
            args.append(self.expr())
        return Node(ECHO, children=args, span=self.span_from(kw, kw))

    def if_stmt(self) -> Node:
        kw = self.expect("if")
        self.expect("(")
        cond = self.expr()
        self.expect(")")
        children = [cond, self.block()]
        if self.at("else"):
            self.next()
            children.append(self.block())
        return Node(IF, children=children, span=self.span_from(kw, kw))

    def block(self) -> Node:
        opener = self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.peek() is None:
                self.fail(("'}'",))
            stmts.append(self.stmt())
        self.expect("}")
        return Node(BLOCK, children=stmts, span=self.span_from(opener, opener))

    def expr(self) -> Node:
        node = self.prim()
        while True:
            tok = self.peek()
            if tok is None or tok[0] not in BINOPS:
                return node
            self.next()
            rhs = self.prim()
            node = Node(BIN_OP, name=tok[0], children=[node, rhs], span=node.span)

    def prim(self) -> Node:
        tok = self.peek()
        if tok is None:
            self.fail(_EXPR_START)
        kind = tok[0]
        if kind == "string":
            self.next()
            return Node(STR_LIT, name=tok[1], span=self.span_from(tok, tok))
        if kind == "number":
            self.next()
            return Node(NUM_LIT, name=str(int(tok[1])), span=self.span_from(tok, tok))
        if kind == "var":
            self.next()
            return Node(VAR, name=tok[1], span=self.span_from(tok, tok))
        if kind == "ident":
            return self.call()
        if kind == "(":
            self.next()
            node = self.expr()
            self.expect(")")
            return node
        self.fail(_EXPR_START)

    def call(self) -> Node:
        name_tok = self.expect("ident")
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.expr())
            while self.at(","):
                self.next()
                args.append(self.expr())
        self.expect(")")
        return Node(CALL, name=name_tok[1], children=args, span=self.span_from(name_tok, name_tok))


def parse(source: str) -> Node:
    """Parse ``source`` into a Program node.

    Raises :class:`ScriptSyntaxError` with location and the expected-token
    set on malformed input.
    """
    return _Parser(source).program()
