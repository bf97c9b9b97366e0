"""Recursive-descent parser for the polynomial expression language.

Grammar:

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' uint)?
    base   := rational | ident | '(' expr ')' | '-' base

Identifiers must come from the caller's variable registry.  Division is
only defined by nonzero rational literals, and exponents must be unsigned
integers; the parser reports those two violations with dedicated errors
rather than a generic syntax failure.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (
    DivisionByNonLiteral,
    ExprSyntaxError,
    NegativeExponent,
    UnknownVariable,
)
from .symbols import Symbol

# Parse-tree nodes are plain tuples:
#   ("lit", Fraction)    ("var", name)      ("neg", node)
#   ("add", l, r)        ("sub", l, r)      ("mul", l, r)
#   ("div", node, Fraction)                 ("pow", node, int)


class _Tokenizer:
    _PUNCT = "+-*/^()"

    def __init__(self, text):
        self.text = text
        self.tokens = []  # (kind, value, position)
        self._scan()

    def _scan(self):
        text = self.text
        i = 0
        while i < len(text):
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            if ch in self._PUNCT:
                self.tokens.append((ch, ch, i))
                i += 1
                continue
            if ch.isdigit():
                j = i
                while j < len(text) and text[j].isdigit():
                    j += 1
                self.tokens.append(("int", int(text[i:j]), i))
                i = j
                continue
            if ch.isalpha() or ch == "_":
                j = i
                while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                self.tokens.append(("ident", text[i:j], i))
                i = j
                continue
            raise ExprSyntaxError(f"unexpected character {ch!r}", i)
        self.tokens.append(("end", None, len(text)))


class _Parser:
    def __init__(self, text, registry):
        self.tokens = _Tokenizer(text).tokens
        self.pos = 0
        self.registry = tuple(registry)

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind, expected):
        tok = self.peek()
        if tok[0] != kind:
            raise ExprSyntaxError(
                f"unexpected token {tok[1]!r}", tok[2], expected=expected
            )
        return self.advance()

    # expr := term (('+'|'-') term)*
    def expr(self):
        node = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.advance()[0]
            rhs = self.term()
            node = ("add" if op == "+" else "sub", node, rhs)
        return node

    # term := factor (('*'|'/') factor)*
    def term(self):
        node = self.factor()
        while self.peek()[0] in ("*", "/"):
            op, _, position = self.advance()
            rhs = self.factor()
            if op == "*":
                node = ("mul", node, rhs)
            else:
                lit = _literal_value(rhs)
                if lit is None:
                    raise DivisionByNonLiteral(
                        f"divisor at position {position} is not a rational literal"
                    )
                if lit == 0:
                    raise DivisionByNonLiteral(
                        f"division by zero literal at position {position}"
                    )
                node = ("div", node, lit)
        return node

    # factor := base ('^' uint)?
    def factor(self):
        node = self.base()
        if self.peek()[0] == "^":
            self.advance()
            node = ("pow", node, self.exponent())
        return node

    def exponent(self):
        # Accepts uint or (uint); a minus sign here is the one grammar
        # violation common enough to deserve its own error.
        parenthesized = False
        if self.peek()[0] == "(":
            parenthesized = True
            self.advance()
        if self.peek()[0] == "-":
            tok = self.advance()
            self.expect("int", "unsigned integer")
            raise NegativeExponent(f"negative exponent at position {tok[2]}")
        tok = self.expect("int", "unsigned integer exponent")
        if parenthesized:
            self.expect(")", "')'")
        return tok[1]

    # base := rational | ident | '(' expr ')' | '-' base
    def base(self):
        tok = self.peek()
        if tok[0] == "int":
            self.advance()
            return ("lit", Fraction(tok[1]))
        if tok[0] == "ident":
            self.advance()
            if tok[1] not in self.registry:
                raise UnknownVariable(
                    f"unknown variable {tok[1]!r} at position {tok[2]}; "
                    f"registry is {self.registry}"
                )
            return ("var", tok[1])
        if tok[0] == "(":
            self.advance()
            node = self.expr()
            self.expect(")", "')'")
            return node
        if tok[0] == "-":
            self.advance()
            return ("neg", self.base())
        raise ExprSyntaxError(
            f"unexpected token {tok[1]!r}", tok[2],
            expected="rational, identifier, '(' or '-'",
        )

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ExprSyntaxError(
                f"trailing input {tok[1]!r}", tok[2], expected="end of expression"
            )
        return node


def _literal_value(node):
    """Fraction value of a (possibly negated) literal node, else None."""
    sign = 1
    while node[0] == "neg":
        sign = -sign
        node = node[1]
    if node[0] == "lit":
        return sign * node[1]
    if node[0] == "div":
        inner = _literal_value(node[1])
        if inner is not None:
            return inner / node[2]
    return None


def parse_tree(text, registry):
    """Parse to the raw tuple tree without folding to a Symbol."""
    return _Parser(text, registry).parse()


def _fold(node, registry):
    kind = node[0]
    if kind == "lit":
        return Symbol.constant(registry, node[1])
    if kind == "var":
        return Symbol.variable(registry, node[1])
    if kind == "neg":
        return -_fold(node[1], registry)
    if kind == "add":
        return _fold(node[1], registry) + _fold(node[2], registry)
    if kind == "sub":
        return _fold(node[1], registry) - _fold(node[2], registry)
    if kind == "mul":
        return _fold(node[1], registry) * _fold(node[2], registry)
    if kind == "div":
        return _fold(node[1], registry) * (Fraction(1) / node[2])
    if kind == "pow":
        return _fold(node[1], registry) ** node[2]
    raise AssertionError(f"unknown node {kind}")


def parse_expr(text, registry):
    """Parse ``text`` into the canonical Symbol over ``registry``."""
    registry = tuple(registry)
    return _fold(parse_tree(text, registry), registry)
