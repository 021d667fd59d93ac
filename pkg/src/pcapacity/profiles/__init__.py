"""
Profile expression language for radial functions σ(t), f(t) and V(t).

    >>> expr = parse("exp(-t^2)")
    >>> evaluate_log(expr, 10.0)
    -100.0
"""

from .nodes import BinOp, Call, Const, Neg, ProfileExpr, Var
from .parser import parse


def evaluate(expr: ProfileExpr, t: float) -> float:
    """Evaluate expr at t; raises ProfileDomainError / ProfileOverflowError"""
    return expr.evaluate(float(t))


def evaluate_log(expr: ProfileExpr, t: float) -> float:
    """log(expr(t)) computed without forming expr(t) where the tree allows it"""
    return expr.log_evaluate(float(t))


def to_text(expr: ProfileExpr) -> str:
    """Pretty-print expr so that parse(to_text(expr)) == expr"""
    return expr.to_text()


__all__ = [
    "ProfileExpr",
    "Const",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "parse",
    "evaluate",
    "evaluate_log",
    "to_text",
]
