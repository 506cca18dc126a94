"""
Quotients, log-convexity and growth indicators of weight sequences.
"""
import math
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, NamedTuple, Optional

from core.errors import NonFiniteEntry, NotLogConvex, RegimeMismatch, WindowTooShort
from core.extreal import (
    DEFAULT_TOLERANCE,
    INF,
    ExtReal,
    close,
    ext_exp,
    is_exact,
    is_finite,
    less_or_close,
)
from core.regime import Regime, classify_regime, computed_regime
from core.sequence import (
    WEIGHT,
    AffineLog,
    FactorialPower,
    Geometric,
    SequenceSpec,
    to_log_scale,
    to_weight_scale,
)

logger = logging.getLogger(__name__)


class LogConvexity(NamedTuple):
    log_convex: bool
    violating_index: Optional[int]


@dataclass(frozen=True)
class GrowthIndicators:
    M_inf: ExtReal
    M_iota: ExtReal
    M_sigma: ExtReal
    boundary_attained: bool


@dataclass(frozen=True)
class LimitComparison:
    lim_quotient: ExtReal
    lim_root: ExtReal
    agree: bool


@dataclass(frozen=True)
class Normalization:
    sequence: SequenceSpec
    q0: int
    constant: ExtReal


@dataclass(frozen=True)
class ClassLC:
    normalized: bool
    log_convex: bool
    standard: bool

    @property
    def member(self) -> bool:
        return self.normalized and self.log_convex and self.standard


def quotients(M: SequenceSpec, window: int) -> List[ExtReal]:
    """mu_0 = 1 and mu_p = M_p / M_{p-1}; exact whenever M is."""
    M = to_weight_scale(M)
    n = M.window(window)
    values = M.weight_values(n)
    for p, x in enumerate(values):
        if not is_finite(x) or x == 0:
            raise NonFiniteEntry(f"M_{p} = {x} is not finite and positive")
    return [Fraction(1)] + [values[p] / values[p - 1] for p in range(1, n)]


def log_quotients(M: SequenceSpec, window: int) -> List[ExtReal]:
    """log mu_p = a_p - a_{p-1}, computed on the log scale so huge weights never overflow."""
    a = to_log_scale(M)
    n = a.window(window)
    values = a.log_values(n)
    for p, x in enumerate(values):
        if not is_finite(x):
            raise NonFiniteEntry(f"a_{p} = {x} is not finite")
    return [Fraction(0)] + [values[p] - values[p - 1] for p in range(1, n)]


def is_log_convex(M: SequenceSpec, window: int, eps: float = DEFAULT_TOLERANCE) -> LogConvexity:
    """
    Checks M_p^2 <= M_{p-1} M_{p+1} for every interior index of the window and
    reports the smallest index where it fails.
    """
    n = M.window(window)
    if M.kind == WEIGHT:
        weights = M.weight_values(n)
        if all(is_exact(x) for x in weights):
            for p in range(1, n - 1):
                if weights[p] ** 2 > weights[p - 1] * weights[p + 1]:
                    return LogConvexity(False, p)
            return LogConvexity(True, None)
    a = to_log_scale(M).log_values(n)
    for p in range(1, n - 1):
        if not less_or_close(2 * a[p], a[p - 1] + a[p + 1], eps):
            return LogConvexity(False, p)
    return LogConvexity(True, None)


def _require_log_convex(M: SequenceSpec, window: int, eps: float):
    check = is_log_convex(M, window, eps)
    if not check.log_convex:
        raise NotLogConvex(f"sequence is not log-convex at index {check.violating_index}", check.violating_index)


def _closed_form_limit(M: SequenceSpec) -> Optional[ExtReal]:
    tail = M.tail
    if isinstance(tail, FactorialPower):
        return INF
    if isinstance(tail, Geometric):
        return tail.d
    if isinstance(tail, AffineLog):
        return ext_exp(tail.c)
    return None


def growth_indicators(M: SequenceSpec, window: int, eps: float = DEFAULT_TOLERANCE) -> GrowthIndicators:
    """
    M_inf = inf_p (M_p/M_0)^(1/p) over the window, and the liminf/limsup of
    (M_p)^(1/p), exact for closed-form tails and estimated from the last
    quarter of the window otherwise.
    """
    a = to_log_scale(M)
    n = a.window(window)
    values = a.log_values(n)
    if not is_finite(values[0]):
        raise NonFiniteEntry("M_0 must be finite")
    best, best_index = INF, None
    for p in range(1, n):
        if not is_finite(values[p]):
            continue
        root = (values[p] - values[0]) / p
        if root < best:
            best, best_index = root, p
    M_inf = ext_exp(best)

    limit = _closed_form_limit(M)
    if limit is not None:
        M_iota = M_sigma = limit
    else:
        regime = computed_regime(a, window, eps)
        if regime.regime == Regime.STANDARD:
            M_iota = M_sigma = INF
        elif regime.regime == Regime.CASE1:
            M_iota = M_sigma = Fraction(0)
        else:
            lo = max(1, n - math.ceil(n / 4))
            roots = [values[p] / p for p in range(lo, n) if is_finite(values[p])]
            if not roots:
                M_iota = M_sigma = INF
            else:
                M_iota, M_sigma = ext_exp(min(roots)), ext_exp(max(roots))
    boundary = a.is_explicit and best_index == n - 1
    return GrowthIndicators(M_inf=M_inf, M_iota=M_iota, M_sigma=M_sigma, boundary_attained=boundary)


def limit_comparison(M: SequenceSpec, window: int, eps: float = DEFAULT_TOLERANCE) -> LimitComparison:
    _require_log_convex(M, window, eps)
    limit = _closed_form_limit(M)
    if limit is None and computed_regime(M, window, eps).regime == Regime.STANDARD:
        limit = INF
    if limit is not None:
        return LimitComparison(lim_quotient=limit, lim_root=limit, agree=True)

    n = M.window(window)
    if n < 3:
        raise WindowTooShort("limit estimates need at least three indices")
    last, before = M.weight_value(n - 1), M.weight_value(n - 2)
    if is_exact(last) and is_exact(before):
        lim_quotient = last / before
    else:
        a = to_log_scale(M)
        lim_quotient = ext_exp(a.log_value(n - 1) - a.log_value(n - 2))
    lim_root = ext_exp(to_log_scale(M).log_value(n - 1) / (n - 1))
    return LimitComparison(lim_quotient=lim_quotient, lim_root=lim_root, agree=close(lim_quotient, lim_root, eps))


def equivalence_constant(M: SequenceSpec, N: SequenceSpec, window: int) -> ExtReal:
    """Smallest C >= 1 with N_p / C <= M_p <= C * N_p on the window."""
    n = min(M.window(window), N.window(window))
    constant = Fraction(1)
    for p in range(n):
        x, y = M.weight_value(p), N.weight_value(p)
        if x == y:
            continue
        if not is_finite(x) or not is_finite(y) or x == 0 or y == 0:
            return INF
        constant = max(constant, x / y, y / x)
    return constant


def normalize_sequence(M: SequenceSpec, window: int, eps: float = DEFAULT_TOLERANCE) -> Normalization:
    """
    Replaces the leading entries of M by 1 up to q0 - 1, where q0 >= 2 is the
    first index from which M stays >= 1 inside the window.
    """
    regime = classify_regime(M, window, eps=eps)
    if regime.regime in (Regime.CASE1, Regime.CASE2):
        raise RegimeMismatch(f"{regime.describe()}: normalization needs the Standard regime")
    M = to_weight_scale(M)
    n = M.window(window)
    values = M.weight_values(n)
    q0 = n
    while q0 > 0 and values[q0 - 1] >= 1:
        q0 -= 1
    q0 = max(q0, 2)
    if q0 >= n:
        raise WindowTooShort(f"no index inside the window of length {n} starts a run of entries >= 1")
    normalized = M.with_prefix([Fraction(1)] * q0 + values[q0:])
    constant = equivalence_constant(M, normalized, n)
    logger.debug(f"normalized with q0 = {q0}, C = {constant}")
    return Normalization(sequence=normalized, q0=q0, constant=constant)


def is_class_lc(M: SequenceSpec, window: int, eps: float = DEFAULT_TOLERANCE) -> ClassLC:
    M = to_weight_scale(M)
    normalized = M.weight_value(0) == 1 and M.weight_value(1) >= 1
    log_convex = is_log_convex(M, window, eps).log_convex
    standard = computed_regime(M, window, eps).regime == Regime.STANDARD
    return ClassLC(normalized=normalized, log_convex=log_convex, standard=standard)
