import math
from fractions import Fraction

import pytest

from core.extreal import INF, NEG_INF
from minorant.construct import regularize
from oracle.brute import brute_minorant, brute_omega, brute_phi_omega, brute_phi_sweep
from oracle.report import compare_values, verify_minorant, verify_omega
from phireg.phi import make_phi


def test_capped_minorant():
    assert brute_minorant([0, -1, 2, 3, 4], slope_cap=1) == [0, -1, 0, 1, 2]


@pytest.mark.parametrize(
    "values, expected",
    [
        ([0, INF, 1, 5], [0, Fraction(1, 2), 1, 5]),
        ([0, 1, INF], [0, 1, INF]),
        ([0, INF], [0, INF]),
        ([3], [3]),
    ],
)
def test_uncapped_minorant(values, expected):
    assert brute_minorant(values) == expected


def test_first_entry_must_be_finite():
    with pytest.raises(ValueError):
        brute_minorant([INF, 1, 2])


def test_brute_omega(factorial):
    weights = factorial.weight_values(20)
    assert brute_omega(weights, 3, 19) == pytest.approx(math.log(4.5))
    assert brute_omega(weights, 0, 19) == 0
    assert brute_omega(weights, Fraction(1, 2), 19) == 0


def test_compare_values():
    report = compare_values("x", [1, 2], [1, 2.5])
    assert report.max_abs == pytest.approx(0.5)
    assert report.max_rel == pytest.approx(0.2)
    assert report.witness == 1
    assert not report.passed
    assert report.to_dict()["passed"] is False

    assert compare_values("x", [INF, 1], [INF, 1]).passed
    infinite = compare_values("x", [NEG_INF], [1])
    assert infinite.max_rel == INF
    assert infinite.witness == 0
    with pytest.raises(ValueError):
        compare_values("x", [1], [1, 2])


def test_verify_minorant(dipped_line, factorial, quadratic_decay, midpoint_recursion):
    for a, window in ((dipped_line, 16), (factorial, 24), (quadratic_decay, 8), (midpoint_recursion, 16)):
        report = verify_minorant(regularize(a, window))
        assert report.passed, report.to_dict()


def test_verify_omega(factorial, geometric2):
    assert verify_omega(factorial, [0.5, 1, 3, 10], 32).passed
    assert verify_omega(geometric2, [0.5, 1.5], 32).passed
    report = verify_omega(geometric2, [0.5, 2, 2.5, 3], 32)
    assert report.passed, report.to_dict()
    assert report.main[2:] == (INF, INF)
    assert report.oracle[2:] == (INF, INF)


def test_brute_omega_past_the_log_limit(geometric2):
    weights = geometric2.weight_values(16)
    assert brute_omega(weights, 3, 15) == pytest.approx(15 * math.log(1.5))
    assert brute_omega(weights, 3, 15, math.log(2)) == INF
    assert brute_omega(weights, Fraction(3, 2), 15, math.log(2)) == 0
    assert brute_omega(weights, 5, 15, NEG_INF) == INF


def test_brute_envelope():
    assert brute_phi_omega([0, -1, 2], Fraction(1, 2)) == Fraction(3, 2)
    assert brute_phi_omega([0, INF, -4], 3) == 10
    with pytest.raises(ValueError):
        brute_phi_omega([INF, 1], 0)


def test_grid_step_must_be_positive():
    with pytest.raises(ValueError):
        brute_phi_sweep([0, 1, 3], make_phi("exp"), 0)
