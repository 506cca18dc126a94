import math
import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

from core.errors import InconsistentDeclaration, UnknownAIota
from core.extreal import (
    DEFAULT_TOLERANCE,
    ExtReal,
    close,
    ext_log,
    format_ext,
    is_finite,
    normalize,
    strictly_less,
)
from core.sequence import (
    AffineLog,
    Expression,
    FactorialPower,
    Geometric,
    SequenceSpec,
    to_log_scale,
)

logger = logging.getLogger(__name__)

# Expression tails are probed at window * 2^k for k = 0..PROBE_DOUBLINGS.
PROBE_DOUBLINGS = 4
# Slope increments between probes must not shrink below this ratio to count as divergence.
GROWTH_RATIO = 0.9
MIN_EVIDENCE = 3


class Regime(str, Enum):
    STANDARD = "standard"
    CASE1 = "case1"
    CASE2 = "case2"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class RegimeClassification:
    regime: Regime
    a_iota: Optional[ExtReal] = None
    evidence_window: Tuple[int, int] = (0, 0)
    provisional: bool = False

    def __post_init__(self):
        object.__setattr__(self, "regime", Regime(self.regime))
        if self.regime == Regime.CASE2:
            if self.a_iota is None or not is_finite(self.a_iota):
                raise UnknownAIota("Case 2 needs a finite a_iota")
            object.__setattr__(self, "a_iota", normalize(self.a_iota))

    def describe(self) -> str:
        if self.regime == Regime.STANDARD:
            return "Standard (lim a_p/p = +inf)"
        if self.regime == Regime.CASE1:
            return "Case 1 (liminf a_p/p = -inf)"
        if self.regime == Regime.CASE2:
            return f"Case 2 (liminf a_p/p = a_iota = {format_ext(self.a_iota)})"
        return "Indeterminate (window evidence inconclusive)"

    def to_dict(self) -> dict:
        return {
            "regime": self.regime.value,
            "a_iota": None if self.a_iota is None else format_ext(self.a_iota),
            "evidence_window": list(self.evidence_window),
            "provisional": self.provisional,
        }


STANDARD = RegimeClassification(Regime.STANDARD)
CASE1 = RegimeClassification(Regime.CASE1)


def case2(a_iota: ExtReal) -> RegimeClassification:
    return RegimeClassification(Regime.CASE2, a_iota=a_iota)


def _increments(slopes: List[ExtReal]) -> List[ExtReal]:
    return [b - a for a, b in zip(slopes, slopes[1:])]


def _diverging(increments: List[ExtReal], eps: float, ratio) -> Optional[Regime]:
    """Standard when slopes keep rising without slowing down, Case 1 when they keep falling."""
    if len(increments) < 2:
        return None
    if all(strictly_less(0, d, eps) for d in increments):
        if not strictly_less(increments[-1], ratio * increments[-2], eps):
            return Regime.STANDARD
    if all(strictly_less(d, 0, eps) for d in increments):
        if not strictly_less(abs(increments[-1]), ratio * abs(increments[-2]), eps):
            return Regime.CASE1
    return None


def _window_evidence(a: SequenceSpec, n: int, eps: float) -> RegimeClassification:
    quarter = math.ceil(n / 4)
    lo = max(1, n - quarter)
    slopes = []
    for p in range(lo, n):
        value = a.log_value(p)
        if not is_finite(value):
            continue
        slopes.append(value / p)
    evidence = (lo, n)
    if len(slopes) < MIN_EVIDENCE:
        return RegimeClassification(Regime.INDETERMINATE, evidence_window=evidence, provisional=True)
    increments = _increments(slopes)
    # non-shrinking increments over the last quarter
    found = _diverging(increments, eps, 1)
    if found is None:
        return RegimeClassification(Regime.INDETERMINATE, evidence_window=evidence, provisional=True)
    return RegimeClassification(found, evidence_window=evidence, provisional=True)


def _probe_expression(a: SequenceSpec, n: int, eps: float) -> RegimeClassification:
    base = max(n, 4)
    points = [base * 2**k for k in range(PROBE_DOUBLINGS + 1)]
    evidence = (base, points[-1] + 1)
    try:
        slopes = [a.log_value(p) / p for p in points]
    except (OverflowError, ValueError, ZeroDivisionError) as e:
        logger.warning(f"expression tail could not be probed: {e}")
        return RegimeClassification(Regime.INDETERMINATE, evidence_window=evidence, provisional=True)
    if not all(is_finite(s) for s in slopes):
        return RegimeClassification(Regime.INDETERMINATE, evidence_window=evidence, provisional=True)
    found = _diverging(_increments(slopes), eps, GROWTH_RATIO)
    if found is not None:
        return RegimeClassification(found, evidence_window=evidence, provisional=True)
    return RegimeClassification(Regime.CASE2, a_iota=slopes[-1], evidence_window=evidence, provisional=True)


def computed_regime(a: SequenceSpec, window: int, eps: float = DEFAULT_TOLERANCE) -> RegimeClassification:
    a = to_log_scale(a)
    tail = a.tail
    n = a.window(window)
    if isinstance(tail, FactorialPower):
        return RegimeClassification(Regime.STANDARD, evidence_window=(len(a.prefix), n))
    if isinstance(tail, AffineLog):
        return RegimeClassification(Regime.CASE2, a_iota=tail.c, evidence_window=(len(a.prefix), n))
    if isinstance(tail, Geometric):
        return RegimeClassification(Regime.CASE2, a_iota=ext_log(tail.d), evidence_window=(len(a.prefix), n))
    if isinstance(tail, Expression):
        return _probe_expression(a, n, eps)
    return _window_evidence(a, n, eps)


def _contradicts(declared: RegimeClassification, computed: RegimeClassification, eps: float) -> bool:
    if computed.regime == Regime.INDETERMINATE:
        return False
    # a converging probe may still be a slowly diverging tail
    strong = not computed.provisional or computed.regime != Regime.CASE2
    if not strong:
        return False
    if declared.regime != computed.regime:
        return True
    if declared.regime == Regime.CASE2 and not computed.provisional:
        return not close(declared.a_iota, computed.a_iota, eps)
    return False


def classify_regime(
    a: SequenceSpec,
    window: int,
    declared: Optional[RegimeClassification] = None,
    eps: float = DEFAULT_TOLERANCE,
) -> RegimeClassification:
    """
    Classifies the growth of a_p/p.

    Args:
    - a: the sequence (either scale; weight sequences are read through log).
    - window: number of leading indices used as evidence.
    - declared: a regime asserted by the caller; falls back to the one
      stored on the sequence.

    Returns:
    The declared regime when it is consistent with the evidence, otherwise
    the computed one.
    """
    computed = computed_regime(a, window, eps)
    if declared is None:
        declared = a.declared_regime
    if declared is None:
        logger.debug(f"computed regime {computed.describe()}")
        return computed
    if _contradicts(declared, computed, eps):
        raise InconsistentDeclaration(
            f"declared {declared.describe()} but the sequence shows {computed.describe()}"
        )
    if declared.regime == Regime.INDETERMINATE:
        return computed
    return declared
