import os
import sys
from fractions import Fraction

import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from core.expression import compile_expression  # noqa: E402
from core.regime import case2  # noqa: E402
from core.sequence import (  # noqa: E402
    LOG,
    WEIGHT,
    AffineLog,
    Expression,
    FactorialPower,
    Geometric,
    SequenceSpec,
    explicit,
)

SEQUENCES_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "sequences")


def midpoint_slopes(c, length):
    """c_1 = 1, c_{p+1} = c/(2(p+1)) + (2p+1) c_p / (2(p+1))."""
    slopes = [None, Fraction(1)]
    for p in range(1, length - 1):
        slopes.append(Fraction(c, 2 * (p + 1)) + Fraction(2 * p + 1, 2 * (p + 1)) * slopes[p])
    return slopes


@pytest.fixture
def sequences_dir():
    return SEQUENCES_DIR


@pytest.fixture
def factorial():
    return SequenceSpec(prefix=(1,), tail=FactorialPower(1), kind=WEIGHT, name="factorial")


@pytest.fixture
def factorial_squared():
    return SequenceSpec(prefix=(1,), tail=FactorialPower(2), kind=WEIGHT, name="factorial_squared")


@pytest.fixture
def geometric2():
    return SequenceSpec(prefix=(1,), tail=Geometric(2), kind=WEIGHT, name="geometric")


@pytest.fixture
def dipped_line():
    """a = (0, -1, 2, 3, 4, ...): a_p = p from p = 2 on."""
    return SequenceSpec(prefix=(0, -1), tail=AffineLog(1), kind=LOG, name="dipped_line")


@pytest.fixture
def unit_line():
    return SequenceSpec(prefix=(0,), tail=AffineLog(1), kind=LOG, name="unit_line")


@pytest.fixture
def midpoint_recursion():
    slopes = midpoint_slopes(2, 16)
    values = [Fraction(0)] + [p * slopes[p] for p in range(1, 16)]
    return explicit(values, kind=LOG, declared_regime=case2(2), name="midpoint_recursion")


@pytest.fixture
def quadratic_decay():
    """a_p = -p^2, Case 1."""
    return SequenceSpec(
        prefix=(0,), tail=Expression(compile_expression("-p**2"), scale=LOG, source="-p**2"), kind=LOG, name="case1"
    )
