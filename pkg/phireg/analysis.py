import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from core.errors import NonFiniteEntry, NotComparable
from core.extreal import (
    DEFAULT_TOLERANCE,
    NEG_INF,
    ExtReal,
    as_float,
    close,
    format_ext,
    is_finite,
    is_neg_inf,
    less_or_close,
)
from core.regime import Regime, RegimeClassification
from core.sequence import SequenceSpec, to_log_scale
from minorant.construct import regularize
from phireg.engine import PhiInterval, PhiRegResult, Segment, check_entries, principal_outlook, sweep
from phireg.phi import InfinitePhi, RegularizingFunction
from weights.functions import PiecewiseLinearFn

logger = logging.getLogger(__name__)

INVARIANCE_SAMPLES = 100
COMPARISON_GRID = np.linspace(-50.0, 50.0, 2001)


def _from_minorant(
    a: SequenceSpec, phi: RegularizingFunction, window: int, declared: Optional[RegimeClassification], eps: float
) -> PhiRegResult:
    la = to_log_scale(a)
    n = la.window(window)
    values = la.log_values(n)
    result = regularize(a, window, declared, eps)
    if result.regime.regime != Regime.CASE1:
        check_entries(la, n, values, allow_infinite_tail=False)
    elif not is_finite(values[0]):
        raise NonFiniteEntry(f"a_0 = {values[0]} must be finite")

    principal = list(result.principal_indices)
    starts = [NEG_INF] + list(result.slopes)
    J_right = result.trace.domain_hi
    intervals, segments = [], []
    for i, p in enumerate(principal):
        last = i + 1 == len(principal)
        end = J_right if last else starts[i + 1]
        intervals.append(PhiInterval(starts[i], end, not last))
        segments.append(Segment(end, (p, values[p]), (p, n if last else principal[i + 1])))

    return PhiRegResult(
        regularized=result.regularized,
        principal_indices=tuple(principal),
        discontinuity_indices=(),
        intervals=tuple(intervals),
        segments=tuple(segments),
        counting=result.trace.counting(),
        trace=result.trace,
        J_right=J_right,
        finite_principal=result.finite_principal or result.regime.regime == Regime.CASE1,
        stable_prefix=result.stable_prefix,
        provisional_from=result.provisional_from,
        principal_outlook=principal_outlook(phi, result.regime, eps),
        regime=result.regime,
        phi_name=phi.descriptor(),
        source=a,
    )


def regularize_with_phi(
    a: SequenceSpec,
    phi: RegularizingFunction,
    window: int,
    declared: Optional[RegimeClassification] = None,
    eps: float = DEFAULT_TOLERANCE,
) -> PhiRegResult:
    """
    The regularization a^phi. phi = +inf reduces to the convex minorant in
    the regime of a (Standard, Case 1 or Case 2); every other phi is swept.
    """
    if phi.infinite:
        return _from_minorant(a, phi, window, declared, eps)
    return sweep(a, phi, window, declared, eps)


def regularize_weights_with_phi(
    M: SequenceSpec, phi: RegularizingFunction, window: int, eps: float = DEFAULT_TOLERANCE
) -> Tuple[PhiRegResult, List[ExtReal]]:
    """M^phi = exp(a^phi), principal entries copied from M."""
    result = regularize_with_phi(M, phi, window, eps=eps)
    return result, result.weights()


def counting_m_phi(result: PhiRegResult, t: ExtReal) -> int:
    return result.counting(t)


def trace_A_phi(result: PhiRegResult, t: ExtReal, extended: bool = False) -> ExtReal:
    """A^phi(t); with extended=True the value is +inf outside J^phi instead of an error."""
    return result.trace(t, extended=extended)


def recover_sequence(trace: PiecewiseLinearFn, phi: RegularizingFunction, p: int) -> ExtReal:
    """a^phi_p = sup {pt - A^phi(t) : t in J^phi, phi(t) >= p}."""
    return trace.legendre_sup(p, lo=phi.threshold(p))


def recover_all(result: PhiRegResult, phi: RegularizingFunction) -> List[ExtReal]:
    return [recover_sequence(result.trace, phi, p) for p in range(result.window)]


@dataclass(frozen=True)
class ComparisonReport:
    lower_phi: str
    upper_phi: str
    holds: bool
    checked_through: int
    violations: Tuple[Tuple[int, str], ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "lower_phi": self.lower_phi,
            "upper_phi": self.upper_phi,
            "holds": self.holds,
            "checked_through": self.checked_through,
            "violations": [{"index": p, "detail": detail} for p, detail in self.violations],
        }


def _comparison_grid(*phis: RegularizingFunction) -> np.ndarray:
    parts = [COMPARISON_GRID]
    for phi in phis:
        if phi.blowup_T is not None:
            T = as_float(phi.blowup_T)
            parts.append(T - np.geomspace(1e3, 1e-6, 400))
            parts.append(T + np.linspace(0.0, 1.0, 11))
    return np.unique(np.concatenate(parts))


def _dominated(lower: np.ndarray, upper: np.ndarray) -> bool:
    return bool(np.all(lower <= upper + 1e-12 * np.maximum(1.0, np.abs(upper))))


def compare_regularizations(
    a: SequenceSpec,
    phi1: RegularizingFunction,
    phi2: RegularizingFunction,
    window: int,
    eps: float = DEFAULT_TOLERANCE,
) -> ComparisonReport:
    """
    Checks a^c <= a^upper <= a^lower <= a for the pointwise smaller (lower)
    and larger (upper) of the two functions.

    Raises NotComparable when neither function dominates on the comparison grid.
    """
    grid = _comparison_grid(phi1, phi2)
    v1, v2 = phi1.evaluate_grid(grid), phi2.evaluate_grid(grid)
    if _dominated(v1, v2):
        lower, upper = phi1, phi2
    elif _dominated(v2, v1):
        lower, upper = phi2, phi1
    else:
        witness = float(grid[np.argmax(v1 > v2)])
        raise NotComparable(f"{phi1.descriptor()} and {phi2.descriptor()} cross near t = {witness}")

    r_lower = regularize_with_phi(a, lower, window, eps=eps)
    r_upper = regularize_with_phi(a, upper, window, eps=eps)
    r_convex = regularize_with_phi(a, InfinitePhi(), window, eps=eps)
    original = to_log_scale(a).log_values(r_lower.window)
    through = min(r_lower.stable_prefix, r_upper.stable_prefix, r_convex.stable_prefix)

    violations = []
    for p in range(through + 1):
        chain = [
            ("convex minorant", r_convex.values[p]),
            (upper.descriptor(), r_upper.values[p]),
            (lower.descriptor(), r_lower.values[p]),
            ("original", original[p]),
        ]
        for (name_lo, lo), (name_hi, hi) in zip(chain, chain[1:]):
            if not less_or_close(lo, hi, eps):
                violations.append((p, f"{name_lo} {format_ext(lo)} > {name_hi} {format_ext(hi)}"))
    if violations:
        logger.warning(f"ordering violated at {len(violations)} place(s)")
    return ComparisonReport(
        lower_phi=lower.descriptor(),
        upper_phi=upper.descriptor(),
        holds=not violations,
        checked_through=through,
        violations=tuple(violations),
    )


def _sample_points(first: PiecewiseLinearFn, second: PiecewiseLinearFn, samples: int) -> List[ExtReal]:
    xs = [bp.x for bp in first.breakpoints] + [bp.x for bp in second.breakpoints]
    if first.is_empty:
        return []
    lo = as_float(min(xs)) - 1.0 if xs else -1.0
    hi = as_float(first.domain_hi) if is_finite(first.domain_hi) else (as_float(max(xs)) + 1.0 if xs else 1.0)
    interior = [float(t) for t in np.linspace(lo, hi, samples + 2)[1:-1]]
    return sorted(set(xs)) + interior


def trace_invariance_check(
    a: SequenceSpec,
    phi: RegularizingFunction,
    window: int,
    samples: int = INVARIANCE_SAMPLES,
    eps: float = DEFAULT_TOLERANCE,
) -> bool:
    """A^phi computed from a and from a^phi agree at every breakpoint and at sampled interior slopes."""
    result = regularize_with_phi(a, phi, window, eps=eps)
    regularized = to_log_scale(a).with_prefix(result.values)
    again = regularize_with_phi(regularized, phi, window, declared=result.regime, eps=eps)
    first, second = result.trace, again.trace
    if first.left_value != second.left_value or first.domain_hi != second.domain_hi:
        return False
    for t in _sample_points(first, second, samples):
        if not first.in_domain(t) or is_neg_inf(t):
            continue
        if not close(first(t), second(t), eps) or not close(first.left_limit(t), second.left_limit(t), eps):
            logger.debug(f"traces differ at t = {t}")
            return False
    return True
