"""
Extended-real values.

An ExtReal is a plain Python number: `Fraction` (or `int`) for exact finite
values, `float` for transcendental ones, and `math.inf` / `-math.inf` for the
two infinities. Python already orders these totally, so the helpers here only
add the conventions 0^0 = 1, 1/(+inf) = 0, 0*(-inf) = 0 and the
log/exp maps that keep huge exact values out of float conversion.
"""
import math
import logging
from fractions import Fraction
from typing import Union

logger = logging.getLogger(__name__)

ExtReal = Union[Fraction, int, float]

INF = math.inf
NEG_INF = -math.inf
DEFAULT_TOLERANCE = 1e-9

_INF_TOKENS = {"inf": INF, "+inf": INF, "infinity": INF, "-inf": NEG_INF, "-infinity": NEG_INF}


def is_exact(x: ExtReal) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def is_pos_inf(x: ExtReal) -> bool:
    return isinstance(x, float) and x == INF


def is_neg_inf(x: ExtReal) -> bool:
    return isinstance(x, float) and x == NEG_INF


def is_finite(x: ExtReal) -> bool:
    if is_exact(x):
        return True
    return math.isfinite(x)


def normalize(x: ExtReal) -> ExtReal:
    """Ints become Fractions; floats and Fractions pass through. NaN is rejected."""
    if isinstance(x, bool):
        raise TypeError("booleans are not sequence values")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float) and math.isnan(x):
        raise ValueError("NaN is not an extended real")
    return x


def parse_ext(raw) -> ExtReal:
    """
    Parses a value from a sequence file.

    Args:
    - raw: an int, a float (read as its exact decimal), or a string holding
      a decimal, a "p/q" rational or one of "inf", "+inf", "-inf".

    Returns:
    The exact ExtReal.
    """
    if isinstance(raw, bool):
        raise ValueError(f"not a number: {raw!r}")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, float):
        if math.isinf(raw):
            return INF if raw > 0 else NEG_INF
        if math.isnan(raw):
            raise ValueError("NaN is not an extended real")
        return Fraction(repr(raw))
    if isinstance(raw, str):
        token = raw.strip().lower()
        if token in _INF_TOKENS:
            return _INF_TOKENS[token]
        try:
            return Fraction(token)
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"not a number: {raw!r}") from e
    raise ValueError(f"not a number: {raw!r}")


def ext_mul(x: ExtReal, y: ExtReal) -> ExtReal:
    # 0 * (+-inf) = 0
    if x == 0 or y == 0:
        if (is_exact(x) and x == 0) or (is_exact(y) and y == 0):
            return Fraction(0)
        return 0.0
    return x * y


def ext_add(x: ExtReal, y: ExtReal) -> ExtReal:
    if (is_pos_inf(x) and is_neg_inf(y)) or (is_neg_inf(x) and is_pos_inf(y)):
        raise ValueError("+inf + -inf is undefined")
    return x + y


def ext_sub(x: ExtReal, y: ExtReal) -> ExtReal:
    return ext_add(x, -y)


def ext_div(x: ExtReal, y: ExtReal) -> ExtReal:
    # 1/(+inf) = 0
    if not is_finite(y):
        if not is_finite(x):
            raise ValueError("inf / inf is undefined")
        return Fraction(0) if is_exact(x) else 0.0
    if y == 0:
        raise ZeroDivisionError("division by zero")
    return x / y


def ext_pow(x: ExtReal, p: int) -> ExtReal:
    # 0^0 = 1
    if p == 0:
        return Fraction(1)
    if is_pos_inf(x):
        return INF
    return x**p


def ext_log(x: ExtReal) -> ExtReal:
    """Natural log with log(0) = -inf, log(+inf) = +inf and log(1) = 0 kept exact."""
    if is_pos_inf(x):
        return INF
    if x < 0:
        raise ValueError(f"log of a negative value: {x}")
    if x == 0:
        return NEG_INF
    if is_exact(x):
        x = Fraction(x)
        if x == 1:
            return Fraction(0)
        # big integers go through math.log exactly; float(x) could overflow
        return math.log(x.numerator) - math.log(x.denominator)
    return math.log(x)


def ext_exp(x: ExtReal) -> ExtReal:
    if is_neg_inf(x):
        return Fraction(0)
    if is_pos_inf(x):
        return INF
    if is_exact(x) and x == 0:
        return Fraction(1)
    try:
        return math.exp(float(x))
    except OverflowError:
        logger.debug(f"exp({float(x)}) overflows, reported as +inf")
        return INF


def as_float(x: ExtReal) -> float:
    if is_exact(x):
        try:
            return float(x)
        except OverflowError:
            return INF if x > 0 else NEG_INF
    return x


def _scale(x: ExtReal, y: ExtReal) -> float:
    return max(1.0, abs(as_float(x)), abs(as_float(y)))


def close(x: ExtReal, y: ExtReal, eps: float = DEFAULT_TOLERANCE) -> bool:
    """Equality: exact for exact operands, relative eps otherwise."""
    if not is_finite(x) or not is_finite(y):
        return x == y
    if is_exact(x) and is_exact(y):
        return x == y
    return abs(as_float(x) - as_float(y)) <= eps * _scale(x, y)


def strictly_less(x: ExtReal, y: ExtReal, eps: float = DEFAULT_TOLERANCE) -> bool:
    if not is_finite(x) or not is_finite(y):
        return x < y
    if is_exact(x) and is_exact(y):
        return x < y
    return as_float(x) < as_float(y) - eps * _scale(x, y)


def less_or_close(x: ExtReal, y: ExtReal, eps: float = DEFAULT_TOLERANCE) -> bool:
    return not strictly_less(y, x, eps)


def format_ext(x: ExtReal):
    """
    Canonical serialization: "inf" / "-inf" strings, integers as ints,
    other rationals as "p/q" strings, floats unchanged.
    """
    if is_pos_inf(x):
        return "inf"
    if is_neg_inf(x):
        return "-inf"
    if is_exact(x):
        x = Fraction(x)
        if x.denominator == 1:
            return x.numerator
        return f"{x.numerator}/{x.denominator}"
    return x
