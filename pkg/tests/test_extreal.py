import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from core.extreal import (
    INF,
    NEG_INF,
    close,
    ext_add,
    ext_div,
    ext_exp,
    ext_log,
    ext_mul,
    ext_pow,
    ext_sub,
    format_ext,
    less_or_close,
    parse_ext,
    strictly_less,
)


@pytest.mark.parametrize(
    "raw, expected",
    [
        (3, Fraction(3)),
        ("5/2", Fraction(5, 2)),
        ("-1.25", Fraction(-5, 4)),
        (0.1, Fraction(1, 10)),
        ("inf", INF),
        ("+inf", INF),
        ("-inf", NEG_INF),
    ],
)
def test_parse_ext(raw, expected):
    assert parse_ext(raw) == expected


@pytest.mark.parametrize("raw", ["abc", True, None, "1/0", float("nan")])
def test_parse_ext_rejects(raw):
    with pytest.raises(ValueError):
        parse_ext(raw)


def test_format_ext_is_canonical():
    assert format_ext(Fraction(4, 2)) == 2
    assert format_ext(Fraction(-3, 6)) == "-1/2"
    assert format_ext(INF) == "inf"
    assert format_ext(NEG_INF) == "-inf"
    assert format_ext(0.5) == 0.5


@given(st.fractions(max_denominator=1000))
def test_format_then_parse_is_lossless(x):
    assert parse_ext(format_ext(x)) == x


def test_conventions():
    assert ext_pow(Fraction(0), 0) == 1
    assert ext_div(Fraction(1), INF) == 0
    assert ext_mul(Fraction(0), NEG_INF) == 0
    assert ext_log(Fraction(0)) == NEG_INF
    assert ext_log(INF) == INF
    assert ext_log(Fraction(1)) == 0 and isinstance(ext_log(Fraction(1)), Fraction)
    assert ext_exp(NEG_INF) == 0
    assert ext_exp(10**6) == INF
    assert ext_add(INF, Fraction(1)) == INF
    with pytest.raises(ValueError):
        ext_add(INF, NEG_INF)
    with pytest.raises(ValueError):
        ext_sub(INF, INF)


def test_log_of_huge_integers_stays_finite():
    huge = Fraction(2) ** 5000
    assert ext_log(huge) == pytest.approx(5000 * math.log(2))


def test_exact_comparisons_ignore_tolerance():
    tiny = Fraction(1, 10**15)
    assert strictly_less(Fraction(0), tiny)
    assert not close(Fraction(0), tiny)


def test_float_comparisons_use_relative_tolerance():
    assert close(1e6, 1e6 + 1e-4)
    assert not strictly_less(1.0, 1.0 + 1e-12)
    assert less_or_close(1.0 + 1e-12, 1.0)
    assert close(INF, INF) and not close(INF, 1e300)


@given(st.floats(min_value=-1e6, max_value=1e6), st.floats(min_value=-1e6, max_value=1e6))
@settings(max_examples=200)
def test_strict_order_is_asymmetric(x, y):
    assert not (strictly_less(x, y) and strictly_less(y, x))
    assert less_or_close(x, y) or less_or_close(y, x)
