import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import midpoint_slopes
from core.errors import InfinityAtZero, RegimeMismatch, UnknownAIota
from core.extreal import INF, NEG_INF
from core.regime import Regime, case2
from core.sequence import LOG, AffineLog, FactorialPower, SequenceSpec, explicit
from minorant.construct import (
    case1_regularize,
    case2_limit_check,
    case2_regularize,
    convex_minorant,
    log_convex_minorant,
    reconstruct_from_trace,
    regularize,
    trace_function,
)
from oracle.brute import brute_minorant

entries = st.fractions(min_value=-20, max_value=20, max_denominator=8)


@st.composite
def standard_sequences(draw):
    prefix = draw(st.lists(entries, min_size=10, max_size=30))
    return SequenceSpec(prefix=tuple(prefix), tail=FactorialPower(2), kind=LOG)


@st.composite
def case2_sequences(draw):
    prefix = draw(st.lists(entries, min_size=3, max_size=15))
    c = draw(st.fractions(min_value=-3, max_value=3, max_denominator=4))
    return SequenceSpec(prefix=tuple(prefix), tail=AffineLog(c), kind=LOG)


@given(standard_sequences())
@settings(max_examples=500, deadline=None)
def test_hull_matches_line_enumeration(a):
    n = len(a.prefix)
    result = convex_minorant(a, n)
    oracle = brute_minorant(list(a.prefix))
    stable = result.stable_prefix + 1
    assert result.values[:stable] == oracle[:stable]
    assert all(x <= y for x, y in zip(result.values, a.prefix))
    assert 0 in result.principal_indices


@given(standard_sequences())
@settings(max_examples=100, deadline=None)
def test_minorant_is_idempotent(a):
    n = len(a.prefix)
    first = convex_minorant(a, n)
    again = convex_minorant(explicit(first.values), n)
    assert again.values == first.values
    assert set(first.principal_indices) <= set(again.principal_indices)


@given(case2_sequences())
@settings(max_examples=50, deadline=None)
def test_case2_minorant_stays_below_the_limit_line(a):
    c = a.tail.c
    window = len(a.prefix) + 10
    result = case2_regularize(a, window=window)
    a0 = a.log_value(0)
    assert result.values[0] == a0
    assert all(x <= a0 + c * p for p, x in enumerate(result.values))
    assert result.stable_prefix == window - 1
    oracle = brute_minorant(a.log_values(window), slope_cap=c)
    assert result.values == oracle


def test_factorial_is_its_own_log_convex_minorant(factorial):
    result = log_convex_minorant(factorial, 64)
    assert result.principal_indices == tuple(range(64))
    assert result.weights() == factorial.weight_values(64)
    assert result.stable_prefix == 63 and result.provisional_from is None
    assert result.regime.regime == Regime.STANDARD


def test_case1_collapses_to_the_first_entry(quadratic_decay):
    result = regularize(quadratic_decay, 16)
    assert result.values == [0] + [NEG_INF] * 15
    assert result.principal_indices == (0,)
    assert result.trace.is_empty
    assert result.trace(Fraction(3), extended=True) == INF
    assert log_convex_minorant(quadratic_decay, 16).weights() == [1] + [0] * 15
    with pytest.raises(RegimeMismatch, match=r"Case 1 \(liminf a_p/p = -inf\)"):
        convex_minorant(quadratic_decay, 16)


def test_case1_regularize_rejects_other_regimes(factorial):
    with pytest.raises(RegimeMismatch):
        case1_regularize(factorial, 16)


def test_affine_tail_with_a_dip(dipped_line):
    result = case2_regularize(dipped_line, window=64)
    assert result.principal_indices == (0, 1)
    assert result.values[0] == 0
    assert all(result.values[p] == p - 2 for p in range(1, 64))
    assert result.stable_prefix == 63
    assert result.finite_principal

    A = result.trace
    assert A(Fraction(-3)) == 0
    assert A(Fraction(-1)) == 0
    assert A(Fraction(1, 2)) == Fraction(3, 2)
    assert A(-0.25) == pytest.approx(0.75, abs=1e-12)
    assert A.domain_hi == 1
    assert A.limit_at_hi() == 2
    assert reconstruct_from_trace(A, 3) == 1
    assert trace_function(dipped_line, 64)(Fraction(0)) == 1


def test_support_lines(dipped_line):
    lines = case2_regularize(dipped_line, window=16).support_lines()
    assert [(line.slope, line.intercept, line.touching_indices) for line in lines] == [
        (NEG_INF, 0, (0,)),
        (-1, 0, (0, 1)),
        (1, -2, (1,)),
    ]


def test_points_on_the_limit_line_are_not_principal(unit_line):
    result = regularize(unit_line, 32)
    assert result.principal_indices == (0,)
    assert result.values == list(range(32))
    assert result.trace(Fraction(1, 2)) == 0
    assert result.trace.breakpoints == ()


def test_midpoint_slopes_give_a_convex_sequence(midpoint_recursion):
    slopes = midpoint_slopes(2, 16)
    assert all(slopes[p] < 2 for p in range(1, 16))
    assert all(x < y for x, y in zip(slopes[1:], slopes[2:]))

    result = case2_regularize(midpoint_recursion, window=64)
    assert result.regime.a_iota == 2
    assert result.principal_indices == tuple(range(16))
    assert result.values == list(midpoint_recursion.prefix)
    assert all(k < 2 for k in result.slopes)


def test_log_convex_minorant_root_approaches_the_limit(dipped_line):
    result = log_convex_minorant(dipped_line, 64)
    weights = result.weights()
    for p in (8, 32, 63):
        assert weights[p] ** (1 / p) == pytest.approx(math.exp((p - 2) / p), rel=1e-12)

    check = case2_limit_check(dipped_line, 64)
    assert check.agree
    assert check.deviation == Fraction(2, 63)
    assert check.m_iota == pytest.approx(math.e)
    assert check.bound_holds


def test_sparse_spikes_witness_non_equivalence():
    values = [Fraction(p) for p in range(20)]
    values[10] = Fraction(100)
    spiky = explicit(values, declared_regime=case2(1))
    check = case2_limit_check(spiky, 20)
    assert check.witness == 10
    assert check.bound_holds


def test_explicit_windows_mark_the_tail_provisional():
    result = convex_minorant(explicit([0, 1, 3, 6, 10]), 5)
    assert result.principal_indices == (0, 1, 2, 3, 4)
    assert result.stable_prefix == 3
    assert result.provisional_from == 4
    payload = result.to_dict()
    assert payload["regularized"] == [0, 1, 3, 6]
    assert payload["provisional"] == [10]


def test_infinite_entries_are_bridged():
    result = convex_minorant(explicit([0, INF, 1, 5]), 4)
    assert result.values[:3] == [0, Fraction(1, 2), 1]
    assert 1 not in result.principal_indices


def test_precondition_errors(dipped_line):
    with pytest.raises(RegimeMismatch, match="Case 2"):
        convex_minorant(dipped_line, 16)
    with pytest.raises(UnknownAIota):
        case2_regularize(explicit([0, 1, 2]), window=3)
    with pytest.raises(InfinityAtZero):
        convex_minorant(explicit([INF, 1, 2, 3]), 4)
