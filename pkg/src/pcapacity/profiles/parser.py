"""
Recursive descent parser for profile expressions.

Grammar:

    expression → term ( ( "+" | "-" ) term )* ;
    term       → unary ( ( "*" | "/" ) unary )* ;
    unary      → "-" unary | power ;
    power      → primary ( "^" unary )? ;
    primary    → NUMBER | "t" | CONSTANT | NAME "(" arguments ")" | "(" expression ")" ;
    arguments  → expression ( "," expression )* ;

`^` is right-associative and binds tighter than unary minus, so
"-t^2" is neg(pow(t, 2)).
"""

import re
import math
import logging
from dataclasses import dataclass
from typing import List

from ..errors import ArityError, ProfileSyntaxError, UnknownIdentifierError
from .nodes import CONSTANTS, FUNCTIONS, BinOp, Call, Const, Neg, ProfileExpr, Var

logger = logging.getLogger(__name__)

TOKEN_PATTERN = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),])"
    r")"
)


@dataclass(frozen=True)
class Token:
    kind: str  # number | name | op | end
    text: str
    position: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        match = TOKEN_PATTERN.match(text, pos)
        if match is None or match.end() == pos:
            offset = len(text[pos:]) - len(text[pos:].lstrip())
            raise ProfileSyntaxError(f"Unexpected character '{text[pos + offset]}'", pos + offset)
        kind = match.lastgroup
        tokens.append(Token(kind, match.group(kind), match.start(kind)))
        pos = match.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class Parser:
    """Parser over a token list; one instance per input string"""

    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.current = 0

    def peek(self) -> Token:
        return self.tokens[self.current]

    def advance(self) -> Token:
        token = self.tokens[self.current]
        if token.kind != "end":
            self.current += 1
        return token

    def match(self, *ops: str) -> bool:
        token = self.peek()
        if token.kind == "op" and token.text in ops:
            self.advance()
            return True
        return False

    def expect(self, op: str) -> None:
        token = self.peek()
        if not self.match(op):
            found = "end of input" if token.kind == "end" else f"'{token.text}'"
            raise ProfileSyntaxError(f"Expected '{op}' but found {found}", token.position)

    def parse(self) -> ProfileExpr:
        expr = self.expression()
        token = self.peek()
        if token.kind != "end":
            raise ProfileSyntaxError(f"Unexpected '{token.text}'", token.position)
        return expr

    def expression(self) -> ProfileExpr:
        left = self.term()
        while True:
            token = self.peek()
            if self.match("+", "-"):
                left = BinOp(token.text, left, self.term())
            else:
                return left

    def term(self) -> ProfileExpr:
        left = self.unary()
        while True:
            token = self.peek()
            if self.match("*", "/"):
                left = BinOp(token.text, left, self.unary())
            else:
                return left

    def unary(self) -> ProfileExpr:
        if self.match("-"):
            return Neg(self.unary())
        return self.power()

    def power(self) -> ProfileExpr:
        base = self.primary()
        if self.match("^"):
            return BinOp("^", base, self.unary())
        return base

    def primary(self) -> ProfileExpr:
        token = self.advance()
        if token.kind == "number":
            value = float(token.text)
            if math.isinf(value):
                raise ProfileSyntaxError(f"Number '{token.text}' is out of range", token.position)
            return Const(value)
        if token.kind == "name":
            return self.named(token)
        if token.kind == "op" and token.text == "(":
            inner = self.expression()
            self.expect(")")
            return inner
        found = "end of input" if token.kind == "end" else f"'{token.text}'"
        raise ProfileSyntaxError(f"Expected a value but found {found}", token.position)

    def named(self, token: Token) -> ProfileExpr:
        name = token.text
        if name == "t":
            return Var()
        if name in CONSTANTS:
            return Const(CONSTANTS[name])
        if name not in FUNCTIONS:
            raise UnknownIdentifierError(name, token.position)
        self.expect("(")
        args = [self.expression()]
        while self.match(","):
            args.append(self.expression())
        self.expect(")")
        arity = FUNCTIONS[name][0]
        if len(args) != arity:
            raise ArityError(
                f"{name} takes {arity} argument(s) but got {len(args)} at position {token.position}"
            )
        return Call(name, tuple(args))


def parse(text: str) -> ProfileExpr:
    """Parse a profile expression such as "exp(-t^2)" into a tree"""
    if not text or not text.strip():
        raise ProfileSyntaxError("Empty expression", 0)
    expr = Parser(text).parse()
    logger.debug(f"Parsed profile '{text}' as {expr!r}")
    return expr
