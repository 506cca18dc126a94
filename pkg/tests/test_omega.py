import logging
import math
from fractions import Fraction
from itertools import accumulate

import numpy as np
import pytest
from hypothesis import example, given, settings, strategies as st

from core.errors import NotLogConvex, OutOfDomain
from core.expression import compile_expression
from core.extreal import INF
from core.sequence import LOG, WEIGHT, Expression, FactorialPower, SequenceSpec, explicit
from oracle.brute import brute_minorant, brute_omega, brute_phi_omega
import weights.omega as omega_module
from weights.omega import (
    counting_function,
    omega_at_quotient,
    omega_direct,
    omega_double_tilde,
    omega_integral,
    omega_piecewise,
    omega_tilde,
    phi_omega,
    underline_log_values,
    underline_sequence,
    young_conjugate,
)

SAMPLES = np.linspace(0.0, 40.0, 200)


def three_ways(M, ts, window):
    for t in ts:
        t = float(t)
        direct = omega_direct(M, t, window).value
        assert omega_piecewise(M, t, window) == pytest.approx(direct, rel=1e-12, abs=1e-12)
        assert omega_integral(M, t, window) == pytest.approx(direct, rel=1e-12, abs=1e-12)


@pytest.fixture
def squares_of_two():
    """M_p = 2^(p^2)."""
    return SequenceSpec(
        prefix=(), tail=Expression(compile_expression("2**(p**2)"), scale=WEIGHT, source="2**(p**2)"), kind=WEIGHT
    )


def test_factorial_at_three(factorial):
    value = omega_direct(factorial, 3, 64)
    assert value.value == pytest.approx(math.log(4.5))
    assert value.argmax_index == 3
    assert not value.boundary_attained
    assert brute_omega(factorial.weight_values(51), Fraction(3), 50) == pytest.approx(math.log(4.5))
    assert omega_piecewise(factorial, 3, 64) == pytest.approx(math.log(4.5))
    assert omega_piecewise(factorial, 2.5, 64) == pytest.approx(math.log(2.5**2 / 2))
    assert omega_piecewise(factorial, 0.5, 64) == 0
    assert omega_at_quotient(factorial, 3, 64) == pytest.approx(math.log(4.5))


def test_three_way_agreement(factorial, factorial_squared, squares_of_two):
    for M in (factorial, factorial_squared, squares_of_two):
        three_ways(M, SAMPLES, 64)


@given(
    st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=10), min_size=3, max_size=25),
    st.fractions(min_value=-5, max_value=5, max_denominator=10),
)
@example([Fraction(0)] * 3, Fraction(0))
@settings(max_examples=50, deadline=None)
def test_three_way_agreement_on_random_log_convex_sequences(steps, a0):
    a = explicit([a0] + [a0 + s for s in accumulate(sorted(steps))], kind=LOG)
    three_ways(a, np.linspace(0.0, 10.0, 200), len(a.prefix))


@pytest.mark.parametrize("m0", [Fraction(1, 2), Fraction(1), Fraction(7)])
def test_constant_shift(m0):
    M = SequenceSpec(prefix=(m0,), tail=FactorialPower(1), kind=WEIGHT)
    log_m0 = math.log(m0)
    for t in SAMPLES:
        difference = omega_direct(M, float(t), 64).value - omega_tilde(M, float(t), 64)
        assert difference == pytest.approx(log_m0, rel=1e-12, abs=1e-12)


def test_geometric_extreme_example(geometric2):
    for t in np.linspace(0.0, 2.0, 21):
        assert omega_direct(geometric2, float(t), 64).value == 0
    assert omega_direct(geometric2, 3, 64).value == INF
    assert omega_direct(geometric2, 2.5, 64).argmax_index is None
    with pytest.raises(OutOfDomain):
        omega_piecewise(geometric2, 3, 64)


def test_explicit_windows_flag_the_boundary():
    M = explicit([1, 2, 4, 8], kind=WEIGHT)
    value = omega_direct(M, 3, 4)
    assert value.boundary_attained
    assert value.value == pytest.approx(3 * math.log(1.5))


def test_double_tilde_drops_the_first_term():
    M = explicit([1, Fraction(1, 2), 4], kind=WEIGHT)
    assert omega_tilde(M, 0.4, 3) == 0
    assert omega_double_tilde(M, 0.4, 3) == pytest.approx(math.log(0.8))
    assert omega_tilde(M, 0, 3) == 0
    with pytest.raises(OutOfDomain):
        omega_double_tilde(M, 0, 3)
    with pytest.raises(OutOfDomain):
        omega_direct(M, -1, 3)


def test_quotient_formulas_need_log_convexity():
    M = explicit([1, 4, 4, 64], kind=WEIGHT)
    with pytest.raises(NotLogConvex):
        omega_piecewise(M, 2, 4)
    with pytest.raises(NotLogConvex):
        counting_function(M, 4)


def test_counting_function(factorial):
    counting = counting_function(factorial, 16)
    assert counting(0.5) == 0
    assert counting(1) == 1
    assert counting(2.5) == 2
    assert counting(15) == 15


def test_phi_omega_and_young_conjugate(factorial):
    envelope = phi_omega(factorial, 32)
    assert envelope(math.log(3)) == pytest.approx(math.log(4.5))
    assert envelope(-5.0) == 0
    assert young_conjugate(factorial, 5, 32) == pytest.approx(math.log(120))


def standard_prefixes():
    return st.lists(st.fractions(min_value=-10, max_value=10, max_denominator=6), min_size=10, max_size=25)


@given(standard_prefixes())
@settings(max_examples=100, deadline=None)
def test_phi_omega_is_the_upper_envelope_of_the_lines(prefix):
    a = SequenceSpec(prefix=tuple(prefix), tail=FactorialPower(2), kind=LOG)
    n = len(prefix)
    values = a.log_values(n)
    envelope = phi_omega(a, n)
    for s in [Fraction(k, 4) for k in range(-40, 41)]:
        assert envelope(s) == pytest.approx(brute_phi_omega(values, s), abs=1e-9)


@given(standard_prefixes())
@settings(max_examples=100, deadline=None)
def test_associated_sequence_against_the_brute_minorant(prefix):
    a = SequenceSpec(prefix=tuple(prefix), tail=FactorialPower(2), kind=LOG)
    n = len(prefix)
    values = a.log_values(n)
    oracle = brute_minorant(values)
    underline = underline_log_values(a, n)
    assert [float(x) for x in underline] == pytest.approx([float(x) for x in oracle], abs=1e-9)
    for p in (1, n // 2, n - 1):
        assert young_conjugate(a, p, n) == pytest.approx(oracle[p] - values[0], abs=1e-9)


def test_envelope_below_the_limit_slope(dipped_line):
    values = dipped_line.log_values(16)
    envelope = phi_omega(dipped_line, 16)
    assert envelope.domain_hi == 1
    for s in [Fraction(k, 4) for k in range(-12, 4)]:
        assert envelope(s) == brute_phi_omega(values, s)
    with pytest.raises(OutOfDomain):
        envelope(1)
    oracle = brute_minorant(values, Fraction(1))
    assert [young_conjugate(dipped_line, p, 16) for p in range(16)] == oracle


def test_geometric_tail_at_its_ratio(geometric2):
    value = omega_direct(geometric2, 2, 64)
    assert value.value == 0
    assert value.argmax_index == 63
    assert not value.boundary_attained


def test_extension_cap_is_reported(factorial, monkeypatch, caplog):
    monkeypatch.setattr(omega_module, "MAX_EXTENDED_WINDOW", 8)
    with caplog.at_level(logging.WARNING, logger="weights.omega"):
        value = omega_direct(factorial, 100, 4)
    assert value.argmax_index == 7
    assert any("window reached 8" in record.getMessage() for record in caplog.records)


def test_associated_sequence_of_a_non_log_convex_weight():
    M = explicit([1, 4, 4, 64, 4096], kind=WEIGHT)
    underline = underline_sequence(M, 5)
    weights = underline.weight_values(5)
    assert weights[0] == 1
    assert all(x <= y * (1 + 1e-12) for x, y in zip(weights, M.prefix))
    assert weights[1] < 4
    oracle = brute_minorant([math.log(x) for x in M.prefix])
    assert [math.log(x) for x in weights] == pytest.approx(oracle, abs=1e-12)
