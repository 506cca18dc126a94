import ast
import math
import operator
from fractions import Fraction
from functools import partial

from core.errors import ParseError
from core.extreal import ExtReal, ext_exp, ext_log, is_exact

_BINARY_OPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}

_UNARY_OPS = {ast.USub: operator.neg, ast.UAdd: operator.pos}


def _factorial(x):
    if not is_exact(x) or Fraction(x).denominator != 1 or x < 0:
        raise ValueError(f"factorial needs a non-negative integer, got {x}")
    return Fraction(math.factorial(int(x)))


def _lgamma(x):
    if is_exact(x) and Fraction(x).denominator == 1 and 1 <= x <= 2:
        return Fraction(0)
    return math.lgamma(float(x))


_FUNCTIONS = {
    "log": ext_log,
    "exp": ext_exp,
    "lgamma": _lgamma,
    "factorial": _factorial,
    "sqrt": lambda x: math.sqrt(float(x)),
}

_CONSTANTS = {"e": math.e, "pi": math.pi}


def _power(base, exponent):
    if is_exact(exponent) and Fraction(exponent).denominator == 1:
        return Fraction(base) ** int(exponent) if is_exact(base) else base ** int(exponent)
    return float(base) ** float(exponent)


def _check(node):
    """Rejects every syntax element outside the arithmetic whitelist."""
    if isinstance(node, ast.Expression):
        _check(node.body)
    elif isinstance(node, ast.BinOp):
        if type(node.op) not in _BINARY_OPS:
            raise ParseError(f"operator {type(node.op).__name__} is not allowed", field="tail.expression")
        _check(node.left)
        _check(node.right)
    elif isinstance(node, ast.UnaryOp):
        if type(node.op) not in _UNARY_OPS:
            raise ParseError(f"operator {type(node.op).__name__} is not allowed", field="tail.expression")
        _check(node.operand)
    elif isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ParseError(f"constant {node.value!r} is not a number", field="tail.expression")
    elif isinstance(node, ast.Name):
        if node.id != "p" and node.id not in _CONSTANTS:
            raise ParseError(f"unknown name {node.id!r}", field="tail.expression")
    elif isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS:
            raise ParseError("only log, exp, lgamma, factorial and sqrt may be called", field="tail.expression")
        if len(node.args) != 1 or node.keywords:
            raise ParseError(f"{node.func.id} takes exactly one argument", field="tail.expression")
        _check(node.args[0])
    else:
        raise ParseError(f"{type(node).__name__} is not allowed", field="tail.expression")


def _evaluate(node, p: int) -> ExtReal:
    if isinstance(node, ast.Expression):
        return _evaluate(node.body, p)
    if isinstance(node, ast.BinOp):
        left = _evaluate(node.left, p)
        right = _evaluate(node.right, p)
        if isinstance(node.op, ast.Pow):
            return _power(left, right)
        return _BINARY_OPS[type(node.op)](left, right)
    if isinstance(node, ast.UnaryOp):
        return _UNARY_OPS[type(node.op)](_evaluate(node.operand, p))
    if isinstance(node, ast.Constant):
        if isinstance(node.value, int):
            return Fraction(node.value)
        return Fraction(repr(node.value))
    if isinstance(node, ast.Name):
        if node.id == "p":
            return Fraction(p)
        return _CONSTANTS[node.id]
    return _FUNCTIONS[node.func.id](_evaluate(node.args[0], p))


def compile_expression(source: str):
    """
    Turns a tail expression such as "-p**2" or "p*log(p+1)" into a pure
    function of the index p. Integer literals stay exact.
    """
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as e:
        raise ParseError(f"invalid expression {source!r}: {e.msg}", field="tail.expression") from e
    _check(tree)
    return partial(_evaluate, tree)
