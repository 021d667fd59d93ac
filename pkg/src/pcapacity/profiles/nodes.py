"""
Expression tree for one-variable radial profiles σ(t), f(t) and V(t).

Nodes are immutable; evaluation is a pure function of the node and t.
Every node evaluates both linearly (`evaluate`) and in log form
(`log_evaluate`), the latter staying finite where the linear value
would overflow or underflow.
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, Tuple

from ..errors import ProfileDomainError, ProfileOverflowError

LN2 = math.log(2.0)

# Printing precedence; higher binds tighter.
PREC_ADD = 1
PREC_MUL = 2
PREC_NEG = 3
PREC_POW = 4
PREC_ATOM = 5

BINARY_PRECEDENCE = {"+": PREC_ADD, "-": PREC_ADD, "*": PREC_MUL, "/": PREC_MUL, "^": PREC_POW}


def _checked(value: float, what: str) -> float:
    if math.isnan(value):
        raise ProfileDomainError(f"{what} is undefined (NaN)")
    if math.isinf(value):
        raise ProfileOverflowError(f"{what} overflows")
    return value


def _power(base: float, exponent: float) -> float:
    if base == 0.0 and exponent < 0.0:
        raise ProfileDomainError(f"0 raised to negative power {exponent}")
    if base < 0.0 and not float(exponent).is_integer():
        raise ProfileDomainError(f"negative base {base} raised to non-integer power {exponent}")
    try:
        return _checked(math.pow(base, exponent), f"{base}^{exponent}")
    except OverflowError:
        raise ProfileOverflowError(f"{base}^{exponent} overflows")


def _log_positive(value: float, what: str) -> float:
    if value <= 0.0:
        raise ProfileDomainError(f"log of non-positive value {value} ({what})")
    return math.log(value)


def _log_sinh(x: float) -> float:
    if x <= 0.0:
        raise ProfileDomainError(f"sinh({x}) is not positive")
    if x < 1.0:
        return math.log(math.sinh(x))
    return x + math.log1p(-math.exp(-2.0 * x)) - LN2


def _log_cosh(x: float) -> float:
    ax = abs(x)
    return ax + math.log1p(math.exp(-2.0 * ax)) - LN2


class ProfileExpr:
    """Base class for expression nodes"""

    precedence = PREC_ATOM

    def evaluate(self, t: float) -> float:
        raise NotImplementedError

    def log_evaluate(self, t: float) -> float:
        """log(evaluate(t)), computed structurally where the node allows it"""
        return _log_positive(self.evaluate(t), self.to_text())

    def to_text(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True)
class Const(ProfileExpr):
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value) or self.value < 0.0:
            raise ValueError(f"Constant nodes hold finite non-negative values, got {self.value}")

    def evaluate(self, t: float) -> float:
        return self.value

    def log_evaluate(self, t: float) -> float:
        return _log_positive(self.value, "constant")

    def to_text(self) -> str:
        return repr(float(self.value))


@dataclass(frozen=True)
class Var(ProfileExpr):
    def evaluate(self, t: float) -> float:
        return t

    def log_evaluate(self, t: float) -> float:
        return _log_positive(t, "t")

    def to_text(self) -> str:
        return "t"


@dataclass(frozen=True)
class Neg(ProfileExpr):
    operand: ProfileExpr

    precedence = PREC_NEG

    def evaluate(self, t: float) -> float:
        return -self.operand.evaluate(t)

    def to_text(self) -> str:
        inner = self.operand.to_text()
        if self.operand.precedence < PREC_NEG:
            inner = f"({inner})"
        return f"-{inner}"


@dataclass(frozen=True)
class BinOp(ProfileExpr):
    op: str
    left: ProfileExpr
    right: ProfileExpr

    def __post_init__(self):
        if self.op not in BINARY_PRECEDENCE:
            raise ValueError(f"Unknown binary operator '{self.op}'")

    @property
    def precedence(self) -> int:  # type: ignore[override]
        return BINARY_PRECEDENCE[self.op]

    def evaluate(self, t: float) -> float:
        a = self.left.evaluate(t)
        b = self.right.evaluate(t)
        if self.op == "+":
            return _checked(a + b, self.to_text())
        if self.op == "-":
            return _checked(a - b, self.to_text())
        if self.op == "*":
            return _checked(a * b, self.to_text())
        if self.op == "/":
            if b == 0.0:
                raise ProfileDomainError(f"division by zero in {self.to_text()}")
            return _checked(a / b, self.to_text())
        return _power(a, b)

    def log_evaluate(self, t: float) -> float:
        if self.op == "*":
            try:
                return self.left.log_evaluate(t) + self.right.log_evaluate(t)
            except ProfileDomainError:
                # both factors negative
                return super().log_evaluate(t)
        if self.op == "/":
            try:
                return self.left.log_evaluate(t) - self.right.log_evaluate(t)
            except ProfileDomainError:
                return super().log_evaluate(t)
        if self.op == "^":
            return _log_power(self.left, self.right, t)
        if self.op == "+":
            try:
                return super().log_evaluate(t)
            except ProfileOverflowError:
                return float(_logaddexp(self.left.log_evaluate(t), self.right.log_evaluate(t)))
        return super().log_evaluate(t)

    def to_text(self) -> str:
        prec = self.precedence
        left = self.left.to_text()
        right = self.right.to_text()
        if self.op == "^":
            # right-associative; the exponent is parsed as a unary expression
            if self.left.precedence <= PREC_POW:
                left = f"({left})"
            if self.right.precedence < PREC_NEG:
                right = f"({right})"
        else:
            if self.left.precedence < prec:
                left = f"({left})"
            if self.right.precedence <= prec:
                right = f"({right})"
        return f"{left} {self.op} {right}"


def _logaddexp(a: float, b: float) -> float:
    hi, lo = (a, b) if a >= b else (b, a)
    return hi + math.log1p(math.exp(lo - hi))


def _log_power(base: ProfileExpr, exponent: ProfileExpr, t: float) -> float:
    e = exponent.evaluate(t)
    if e == 0.0:
        return 0.0
    try:
        return e * base.log_evaluate(t)
    except ProfileDomainError:
        # negative base with an integer exponent, or an exact zero
        value = _power(base.evaluate(t), e)
        return _log_positive(value, f"({base.to_text()})^{e}")


def _exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        raise ProfileOverflowError(f"exp({x}) overflows")


def _log(x: float) -> float:
    return _log_positive(x, "log argument")


def _sqrt(x: float) -> float:
    if x < 0.0:
        raise ProfileDomainError(f"sqrt of negative value {x}")
    return math.sqrt(x)


def _sinh(x: float) -> float:
    try:
        return math.sinh(x)
    except OverflowError:
        raise ProfileOverflowError(f"sinh({x}) overflows")


def _cosh(x: float) -> float:
    try:
        return math.cosh(x)
    except OverflowError:
        raise ProfileOverflowError(f"cosh({x}) overflows")


# name -> (arity, evaluator)
FUNCTIONS: Dict[str, Tuple[int, Callable[..., float]]] = {
    "exp": (1, _exp),
    "log": (1, _log),
    "sqrt": (1, _sqrt),
    "sinh": (1, _sinh),
    "cosh": (1, _cosh),
    "pow": (2, _power),
}

CONSTANTS: Dict[str, float] = {
    "pi": math.pi,
    "e": math.e,
}


@dataclass(frozen=True)
class Call(ProfileExpr):
    name: str
    args: Tuple[ProfileExpr, ...]

    def __post_init__(self):
        if self.name not in FUNCTIONS:
            raise ValueError(f"Unknown function '{self.name}'")
        arity = FUNCTIONS[self.name][0]
        if len(self.args) != arity:
            raise ValueError(f"{self.name} takes {arity} argument(s), got {len(self.args)}")

    def evaluate(self, t: float) -> float:
        fn = FUNCTIONS[self.name][1]
        return _checked(fn(*(arg.evaluate(t) for arg in self.args)), self.to_text())

    def log_evaluate(self, t: float) -> float:
        if self.name == "exp":
            return self.args[0].evaluate(t)
        if self.name == "pow":
            return _log_power(self.args[0], self.args[1], t)
        if self.name == "sqrt":
            return 0.5 * self.args[0].log_evaluate(t)
        if self.name == "sinh":
            return _log_sinh(self.args[0].evaluate(t))
        if self.name == "cosh":
            return _log_cosh(self.args[0].evaluate(t))
        return super().log_evaluate(t)

    def to_text(self) -> str:
        return f"{self.name}({', '.join(arg.to_text() for arg in self.args)})"
