"""
Side-by-side comparison of a main computation against its brute-force oracle.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from core.extreal import DEFAULT_TOLERANCE, INF, NEG_INF, ExtReal, as_float, format_ext, is_finite
from core.regime import Regime, RegimeClassification, classify_regime
from core.sequence import SequenceSpec, to_log_scale, to_weight_scale
from oracle.brute import brute_minorant, brute_omega, brute_phi_sweep
from weights.omega import omega_direct

logger = logging.getLogger(__name__)

DEFAULT_SWEEP_STEP = 1e-3


@dataclass(frozen=True)
class OracleReport:
    quantity: str
    main: tuple
    oracle: tuple
    max_abs: float
    max_rel: float
    witness: Optional[int]
    tolerance: float = DEFAULT_TOLERANCE

    @property
    def passed(self) -> bool:
        return self.max_rel <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "main": [format_ext(x) for x in self.main],
            "oracle": [format_ext(x) for x in self.oracle],
            "max_abs_deviation": format_ext(self.max_abs),
            "max_rel_deviation": format_ext(self.max_rel),
            "witness": self.witness,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def _deviation(x: ExtReal, y: ExtReal):
    if not is_finite(x) or not is_finite(y):
        return (0.0, 0.0) if x == y else (INF, INF)
    diff = abs(as_float(x) - as_float(y))
    return diff, diff / max(1.0, abs(as_float(x)), abs(as_float(y)))


def compare_values(
    quantity: str, main: Sequence[ExtReal], oracle: Sequence[ExtReal], tolerance: float = DEFAULT_TOLERANCE
) -> OracleReport:
    """Largest absolute and relative deviation; the witness is the first index attaining the relative one."""
    if len(main) != len(oracle):
        raise ValueError(f"{quantity}: {len(main)} main values against {len(oracle)} oracle values")
    max_abs, max_rel, witness = 0.0, 0.0, None
    for i, (x, y) in enumerate(zip(main, oracle)):
        d_abs, d_rel = _deviation(x, y)
        max_abs = max(max_abs, d_abs)
        if d_rel > max_rel:
            max_rel, witness = d_rel, i
    report = OracleReport(quantity, tuple(main), tuple(oracle), max_abs, max_rel, witness, tolerance)
    if not report.passed:
        logger.warning(f"{quantity}: oracle deviation {max_rel} at index {witness}")
    return report


def verify_minorant(result, tolerance: float = DEFAULT_TOLERANCE) -> OracleReport:
    """Checks the stable prefix of a MinorantResult (or a phi = +inf result) against brute_minorant."""
    n = result.window
    original = to_log_scale(result.source).log_values(n)
    regime = result.regime
    if regime.regime == Regime.CASE1:
        oracle = [original[0]] + [-INF] * (n - 1)
    else:
        cap = regime.a_iota if regime.regime == Regime.CASE2 else None
        oracle = brute_minorant(original, cap, tolerance)
    stable = result.stable_prefix + 1
    return compare_values("convex minorant", result.values[:stable], oracle[:stable], tolerance)


def _log_limit(regime: RegimeClassification) -> Optional[ExtReal]:
    """liminf a_p/p where the regime settles it: -inf in Case 1, a_iota in a proven Case 2."""
    if regime.regime == Regime.CASE1:
        return NEG_INF
    if regime.regime == Regime.CASE2 and not regime.provisional:
        return regime.a_iota
    return None


def verify_omega(M: SequenceSpec, ts: Sequence[float], window: int, tolerance: float = DEFAULT_TOLERANCE) -> OracleReport:
    """
    omega_M on a grid against the plain maximum over the indices the main
    computation searched (closed-form tails may have extended the window).
    Past the liminf of a_p/p both sides must report +inf.
    """
    W = to_weight_scale(M)
    n = W.window(window)
    values = [omega_direct(M, t, window) for t in ts]
    reach = max([n] + [v.argmax_index + 2 for v in values if v.argmax_index is not None])
    reach = W.window(reach)
    weights = W.weight_values(reach)
    log_limit = _log_limit(classify_regime(to_log_scale(M), window))
    oracle = [brute_omega(weights, t, reach - 1, log_limit) for t in ts]
    return compare_values("omega", [v.value for v in values], oracle, tolerance)


def verify_phireg(result, phi, step: float = DEFAULT_SWEEP_STEP) -> OracleReport:
    """
    Regularized values of a swept result against the grid simulation. The
    grid is only accurate to about step * window, which becomes the tolerance.
    """
    n = result.window
    original = to_log_scale(result.source).log_values(n)
    approx = brute_phi_sweep(original, phi, step)
    stable = result.stable_prefix + 1
    main = result.values[:stable]
    oracle = list(approx.regularized[:stable])
    missing = sorted(set(result.principal_indices) ^ set(approx.principal_indices))
    if missing and step < approx.min_event_gap:
        logger.info(f"principal indices differ from the grid at {missing}")
    tolerance = float(np.clip(2 * step * n, DEFAULT_TOLERANCE, None))
    return compare_values("phi regularization", main, oracle, tolerance)
