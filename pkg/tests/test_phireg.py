import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from core.errors import InfiniteEntryUnsupported, InfinityAtZero, NonFiniteEntry, NotComparable, OutOfDomain
from core.expression import compile_expression
from core.extreal import INF, NEG_INF, close, ext_mul, less_or_close
from core.regime import CASE1, STANDARD, RegimeClassification, Regime, case2
from core.sequence import LOG, Expression, FactorialPower, SequenceSpec, explicit
from minorant.construct import regularize
from oracle.brute import brute_minorant, brute_phi_sweep
from oracle.report import verify_phireg
from phireg.analysis import (
    compare_regularizations,
    counting_m_phi,
    recover_all,
    recover_sequence,
    regularize_weights_with_phi,
    regularize_with_phi,
    trace_A_phi,
    trace_invariance_check,
)
from phireg.engine import FINITE, INFINITE, UNDETERMINED, principal_outlook
from phireg.phi import InfinitePhi, make_phi


@pytest.fixture
def jumpy():
    """S_1 is dropped from the hull when S_2 enters, so A^phi jumps at 1/2 under blowup:1."""
    return explicit([0, 0, -1, 5], kind=LOG, name="jumpy")


@pytest.fixture
def bumpy():
    return explicit([0, 2, 1, 3, 6, 10], kind=LOG, name="bumpy")


def test_infinite_phi_is_the_convex_minorant(dipped_line, factorial):
    for a in (dipped_line, factorial):
        result = regularize_with_phi(a, InfinitePhi(), 16)
        minorant = regularize(a, 16)
        assert result.values == minorant.values
        assert result.principal_indices == minorant.principal_indices
        assert result.discontinuity_indices == ()
    result = regularize_with_phi(dipped_line, InfinitePhi(), 16)
    assert [i.to_dict() for i in result.intervals] == [
        {"start": "-inf", "end": -1, "closed_right": True},
        {"start": -1, "end": 1, "closed_right": False},
    ]
    assert result.J_right == 1
    assert result.principal_outlook == UNDETERMINED


def test_exp_regularization_of_the_factorial(factorial):
    phi = make_phi("exp")
    result = regularize_with_phi(factorial, phi, 16)
    assert result.principal_indices == tuple(range(16))
    assert result.discontinuity_indices == ()
    assert result.values == pytest.approx([math.log(math.factorial(p)) for p in range(16)])
    assert result.stable_prefix == 15
    assert result.provisional_from is None
    assert result.principal_outlook == INFINITE
    assert counting_m_phi(result, -1) == 0
    assert counting_m_phi(result, math.log(5) + 0.01) == 5
    _, weights = regularize_weights_with_phi(factorial, phi, 8)
    assert weights == factorial.weight_values(8)


def test_jump_under_blowup(jumpy):
    phi = make_phi("blowup:1")
    result = regularize_with_phi(jumpy, phi, 4)
    assert result.principal_indices == (0, 1, 2)
    assert result.discontinuity_indices == (2,)
    assert result.values == [0, 0, -1, 0]
    assert result.stable_prefix == 2
    assert result.provisional_from == 3
    assert result.finite_principal
    assert [(i.start, i.end, i.closed_right) for i in result.intervals] == [
        (NEG_INF, 0, True),
        (0, Fraction(1, 2), False),
        (Fraction(1, 2), 1, False),
    ]
    assert [s.slope for s in result.segments] == [0, Fraction(1, 2), 1]

    assert trace_A_phi(result, Fraction(1, 4)) == Fraction(1, 4)
    assert trace_A_phi(result, Fraction(1, 2)) == 2
    assert result.trace.left_limit(Fraction(1, 2)) == Fraction(1, 2)
    assert trace_A_phi(result, 1, extended=True) == INF
    with pytest.raises(OutOfDomain):
        trace_A_phi(result, 1)
    assert counting_m_phi(result, Fraction(3, 5)) == 2

    assert recover_sequence(result.trace, phi, 3) == 0
    assert recover_all(result, phi) == result.values


def test_jump_matches_the_grid_sweep(jumpy):
    phi = make_phi("blowup:1")
    result = regularize_with_phi(jumpy, phi, 4)
    approx = brute_phi_sweep(jumpy.prefix, phi, 1e-3)
    assert approx.principal_indices == result.principal_indices
    assert approx.discontinuity_indices == (2,)
    assert approx.jump_locations[0] == pytest.approx(0.5, abs=2e-3)
    assert verify_phireg(result, phi).passed


def test_exp_sweep_matches_the_grid_sweep(bumpy):
    phi = make_phi("exp")
    result = regularize_with_phi(bumpy, phi, 6)
    assert result.principal_indices == (0, 2, 3, 4, 5)
    assert result.discontinuity_indices == (2,)
    assert result.stable_prefix == 2
    assert result.values[:3] == pytest.approx([0, math.log(2), 1])
    assert trace_A_phi(result, 2.5) == pytest.approx(4.5)

    approx = brute_phi_sweep(bumpy.prefix, phi, 1e-3)
    assert approx.principal_indices == result.principal_indices
    assert approx.discontinuity_indices == (2,)
    report = verify_phireg(result, phi)
    assert report.passed
    assert report.tolerance == pytest.approx(0.012)


def test_blowup_leaves_finitely_many_principal_indices(factorial):
    result = regularize_with_phi(factorial, make_phi("blowup:1"), 8)
    assert result.principal_indices == (0, 1, 2)
    assert result.finite_principal
    assert result.principal_outlook == FINITE
    assert result.J_right == 1
    assert result.values[5] == pytest.approx(math.log(2) + 3)
    assert result.stable_prefix == 2


def test_blowup_admits_sequences_that_end_in_infinity():
    a = SequenceSpec(
        prefix=(), tail=Expression(compile_expression("exp(exp(p))"), scale=LOG, source="exp(exp(p))"), kind=LOG
    )
    with pytest.raises(InfiniteEntryUnsupported):
        regularize_with_phi(a, make_phi("exp"), 16)
    result = regularize_with_phi(a, make_phi("blowup:1"), 16)
    assert result.principal_indices == (0,)
    assert result.values[3] == pytest.approx(math.e + 3)


def test_entry_errors():
    with pytest.raises(InfinityAtZero):
        regularize_with_phi(explicit([INF, 1, 2]), make_phi("exp"), 3)
    with pytest.raises(NonFiniteEntry):
        regularize_with_phi(explicit([0, NEG_INF, 1]), make_phi("exp"), 3)


@pytest.mark.parametrize(
    "phi, regime, expected",
    [
        ("exp", STANDARD, INFINITE),
        ("exp", CASE1, INFINITE),
        ("blowup:1", STANDARD, FINITE),
        ("blowup:1", CASE1, INFINITE),
        ("blowup:1", case2(Fraction(1, 2)), INFINITE),
        ("blowup:1", case2(2), FINITE),
        ("blowup:1", case2(1), UNDETERMINED),
        ("infinite", STANDARD, INFINITE),
        ("infinite", CASE1, FINITE),
        ("infinite", case2(1), UNDETERMINED),
        ("blowup:1", RegimeClassification(Regime.INDETERMINATE), UNDETERMINED),
    ],
)
def test_principal_outlook(phi, regime, expected):
    assert principal_outlook(make_phi(phi), regime) == expected


def test_comparison_chain(bumpy):
    report = compare_regularizations(bumpy, make_phi("expaffine:1,1"), make_phi("exp"), 6)
    assert report.holds
    assert report.lower_phi == "exp"
    assert report.upper_phi == "expaffine:1,1"
    assert report.checked_through == 2
    assert report.to_dict()["violations"] == []


def test_crossing_functions_are_not_comparable(bumpy):
    with pytest.raises(NotComparable):
        compare_regularizations(bumpy, make_phi("exp"), make_phi("expaffine:2,0"), 6)


def test_trace_is_invariant_under_regularization(jumpy, bumpy):
    assert trace_invariance_check(jumpy, make_phi("blowup:1"), 4)
    assert trace_invariance_check(bumpy, InfinitePhi(), 6)


PHIS = ["exp", "expaffine:2,1", "blowup:1", "infinite"]


@st.composite
def standard_sequences(draw):
    prefix = draw(st.lists(st.fractions(min_value=-20, max_value=20, max_denominator=8), min_size=4, max_size=12))
    return SequenceSpec(prefix=tuple(prefix), tail=FactorialPower(2), kind=LOG)


@pytest.mark.parametrize("descriptor", PHIS)
@given(a=standard_sequences())
@settings(max_examples=50, deadline=None)
def test_sequence_is_recovered_from_the_trace(descriptor, a):
    phi = make_phi(descriptor)
    result = regularize_with_phi(a, phi, len(a.prefix))
    for p, (recovered, value) in enumerate(zip(recover_all(result, phi), result.values)):
        assert close(recovered, value), f"index {p}"


@pytest.mark.parametrize("descriptor", PHIS)
@given(a=standard_sequences())
@settings(max_examples=50, deadline=None)
def test_regularization_lies_between_the_minorant_and_the_sequence(descriptor, a):
    result = regularize_with_phi(a, make_phi(descriptor), len(a.prefix))
    minorant = brute_minorant(list(a.prefix))
    for p, (value, original) in enumerate(zip(result.values, a.prefix)):
        assert less_or_close(value, original), f"index {p}"
        if p <= result.principal_indices[-1]:
            assert less_or_close(minorant[p], value), f"index {p}"
    for p in result.principal_indices:
        assert result.values[p] == a.prefix[p]


@pytest.mark.parametrize("lower, upper", [("exp", "expaffine:1,1"), ("blowup:2", "blowup:1")])
@given(a=standard_sequences())
@settings(max_examples=50, deadline=None)
def test_larger_phi_gives_a_smaller_regularization(lower, upper, a):
    report = compare_regularizations(a, make_phi(upper), make_phi(lower), len(a.prefix))
    assert report.lower_phi == lower
    assert report.upper_phi == upper
    assert report.holds, report.violations


@given(a=standard_sequences())
@settings(max_examples=50, deadline=None)
def test_exp_regularization_dominates_the_convex_minorant(a):
    n = len(a.prefix)
    swept = regularize_with_phi(a, make_phi("exp"), n).values
    convex = regularize_with_phi(a, InfinitePhi(), n).values
    assert all(less_or_close(x, y) for x, y in zip(convex, swept))


def slopes_to_check(trace):
    xs = [bp.x for bp in trace.breakpoints]
    if not xs:
        return [Fraction(0)]
    points = xs + [x - 1 for x in xs[:1]] + [(x + y) / 2 for x, y in zip(xs, xs[1:])] + [xs[-1] + 1]
    return [t for t in points if trace.in_domain(t)]


@pytest.mark.parametrize("descriptor", PHIS)
@given(a=standard_sequences())
@settings(max_examples=50, deadline=None)
def test_trace_is_the_line_through_the_current_principal_point(descriptor, a):
    result = regularize_with_phi(a, make_phi(descriptor), len(a.prefix))
    for t in slopes_to_check(result.trace):
        m = counting_m_phi(result, t)
        assert close(trace_A_phi(result, t), ext_mul(m, t) - a.prefix[m]), f"t = {t}"


@pytest.mark.parametrize("descriptor", PHIS)
@given(a=standard_sequences())
@settings(max_examples=50, deadline=None)
def test_trace_invariance_and_idempotence_on_random_sequences(descriptor, a):
    phi = make_phi(descriptor)
    n = len(a.prefix)
    assert trace_invariance_check(a, phi, n)
    result = regularize_with_phi(a, phi, n)
    again = regularize_with_phi(a.with_prefix(result.values), phi, n)
    assert all(close(x, y) for x, y in zip(again.values, result.values))
