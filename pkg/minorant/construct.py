import math
import logging
from bisect import bisect_right
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

from core.errors import InfinityAtZero, NonFiniteEntry, RegimeMismatch, UnknownAIota
from core.extreal import (
    DEFAULT_TOLERANCE,
    INF,
    NEG_INF,
    ExtReal,
    close,
    ext_exp,
    ext_log,
    ext_mul,
    format_ext,
    is_finite,
    is_pos_inf,
    less_or_close,
    strictly_less,
)
from core.regime import Regime, RegimeClassification, case2, classify_regime
from core.sequence import (
    LOG,
    WEIGHT,
    AffineLog,
    FactorialPower,
    Geometric,
    SequenceSpec,
    explicit,
    to_log_scale,
)
from minorant.hull import Point, edge_slope, lower_hull
from weights.functions import Breakpoint, PiecewiseLinearFn

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SupportLine:
    slope: ExtReal
    intercept: ExtReal
    touching_indices: Tuple[int, ...]


@dataclass(frozen=True)
class MinorantResult:
    regularized: SequenceSpec
    principal_indices: Tuple[int, ...]
    trace: PiecewiseLinearFn
    regime: RegimeClassification
    stable_prefix: int
    provisional_from: Optional[int]
    slopes: Tuple[ExtReal, ...]
    intercepts: Tuple[ExtReal, ...]
    finite_principal: bool
    source: SequenceSpec
    scale: str = LOG

    @property
    def values(self) -> List[ExtReal]:
        return list(self.regularized.prefix)

    @property
    def window(self) -> int:
        return len(self.regularized.prefix)

    def weights(self) -> List[ExtReal]:
        """M^lc = exp(a~); principal entries are copied from the input so they stay exact."""
        principal = set(self.principal_indices)
        return [
            self.source.weight_value(p) if p in principal else ext_exp(x)
            for p, x in enumerate(self.values)
        ]

    def support_lines(self, eps: float = DEFAULT_TOLERANCE) -> List[SupportLine]:
        """
        The y-axis line through S_0 followed by one supporting line per distinct
        hull slope; in Case 2 the limiting line of slope a_iota closes the list.
        """
        original = self.source.log_values(self.window)
        lines = [SupportLine(NEG_INF, original[0], (0,))]
        slopes = list(self.slopes)
        intercepts = list(self.intercepts)
        if self.regime.regime == Regime.CASE2 and self.principal_indices:
            last = self.principal_indices[-1]
            slopes.append(self.regime.a_iota)
            intercepts.append(original[last] - ext_mul(self.regime.a_iota, last))
        for k, d in zip(slopes, intercepts):
            if len(lines) > 1 and lines[-1].slope == k:
                continue
            touching = tuple(
                q for q, value in enumerate(original) if is_finite(value) and close(value, d + ext_mul(k, q), eps)
            )
            lines.append(SupportLine(k, d, touching))
        return lines

    def to_dict(self) -> dict:
        values = self.values
        stable = values[: self.stable_prefix + 1]
        provisional = values[self.provisional_from :] if self.provisional_from is not None else []
        res = {
            "regularized": [format_ext(x) for x in stable],
            "provisional": [format_ext(x) for x in provisional],
            "provisional_from": self.provisional_from,
            "stable_prefix": self.stable_prefix,
            "principal_indices": list(self.principal_indices),
            "slopes": [format_ext(k) for k in self.slopes],
            "intercepts": [format_ext(d) for d in self.intercepts],
            "trace_breakpoints": self.trace.to_dict()["breakpoints"],
            "trace_left_value": format_ext(self.trace.left_value),
            "trace_domain_hi": format_ext(self.trace.domain_hi),
            "regime": self.regime.to_dict(),
            "finite_principal": self.finite_principal,
            "scale": self.scale,
        }
        if self.scale == WEIGHT:
            weights = self.weights()
            res["weights"] = [format_ext(x) for x in weights[: self.stable_prefix + 1]]
            res["provisional_weights"] = (
                [format_ext(x) for x in weights[self.provisional_from :]] if self.provisional_from is not None else []
            )
        return res


@dataclass(frozen=True)
class Case2LimitCheck:
    lim_root_lc: ExtReal
    m_iota: ExtReal
    agree: bool
    deviation: ExtReal
    witness: Optional[int]
    bound_holds: bool


def _check_first_entry(values: List[ExtReal]):
    if is_pos_inf(values[0]):
        raise InfinityAtZero("a_0 = +inf: the construction has no starting point S_0")
    if not is_finite(values[0]):
        raise NonFiniteEntry(f"a_0 = {values[0]} must be finite")


def _trace_from_vertices(principal: List[Point], slopes: List[ExtReal], domain_hi: ExtReal) -> PiecewiseLinearFn:
    breakpoints: List[Breakpoint] = []
    for i, k in enumerate(slopes):
        u, v = principal[i], principal[i + 1]
        if breakpoints and breakpoints[-1].x == k:
            # collinear run: the largest touching index carries the slope
            breakpoints[-1] = replace(breakpoints[-1], slope_right=v[0])
            continue
        value = ext_mul(u[0], k) - u[1]
        breakpoints.append(Breakpoint(x=k, left_value=value, right_value=value, slope_right=v[0]))
    return PiecewiseLinearFn(left_value=-principal[0][1], breakpoints=tuple(breakpoints), domain_hi=domain_hi)


def _tail_proves_window(a: SequenceSpec, n: int, indices: List[int], regime: Regime, capped: bool) -> bool:
    if a.is_explicit or n < len(a.prefix) + 2:
        return False
    if regime == Regime.CASE2:
        return isinstance(a.tail, (AffineLog, Geometric)) and capped
    # convex tails never pop the last edge once it joins two tail points
    return isinstance(a.tail, FactorialPower) and indices[-2:] == [n - 2, n - 1]


def _build(
    source: SequenceSpec, n: int, regime: RegimeClassification, cap: Optional[ExtReal], eps: float
) -> MinorantResult:
    a = to_log_scale(source)
    values = a.log_values(n)
    _check_first_entry(values)
    hull = lower_hull(values, eps)

    principal = [hull[0]]
    capped = False
    for vertex in hull[1:]:
        if cap is not None and not strictly_less(edge_slope(principal[-1], vertex), cap, eps):
            capped = True
            break
        principal.append(vertex)
    slopes = [edge_slope(u, v) for u, v in zip(principal, principal[1:])]
    intercepts = [u[1] - ext_mul(k, u[0]) for u, k in zip(principal, slopes)]
    indices = [p for p, _ in principal]

    regularized = []
    for p in range(n):
        i = bisect_right(indices, p) - 1
        p_i, a_i = principal[i]
        if p == p_i:
            regularized.append(a_i)
        elif i + 1 < len(principal):
            regularized.append(a_i + ext_mul(slopes[i], p - p_i))
        elif cap is not None:
            regularized.append(a_i + ext_mul(cap, p - p_i))
        else:
            regularized.append(INF)

    trace = _trace_from_vertices(principal, slopes, INF if cap is None else cap)
    finite_principal = cap is not None and (capped or indices[-1] < n - 1)

    if _tail_proves_window(a, n, indices, regime.regime, capped):
        stable_prefix, provisional_from = n - 1, None
    else:
        inside = [p for p in indices if p < n - 1]
        stable_prefix = inside[-1] if inside else 0
        provisional_from = stable_prefix + 1 if stable_prefix < n - 1 else None
    if provisional_from is not None:
        logger.debug(f"values from index {provisional_from} on depend on entries beyond the window")

    return MinorantResult(
        regularized=explicit(regularized, kind=LOG, declared_regime=regime, name=a.name),
        principal_indices=tuple(indices),
        trace=trace,
        regime=regime,
        stable_prefix=stable_prefix,
        provisional_from=provisional_from,
        slopes=tuple(slopes),
        intercepts=tuple(intercepts),
        finite_principal=finite_principal,
        source=source,
    )


def convex_minorant(
    a: SequenceSpec,
    window: int,
    declared: Optional[RegimeClassification] = None,
    eps: float = DEFAULT_TOLERANCE,
) -> MinorantResult:
    """
    Largest convex sequence below a on the window.

    Principal indices are the lower hull vertices of (p, a_p); every other
    index is projected vertically onto the hull edge spanning it.
    """
    n = a.window(window)
    regime = classify_regime(a, window, declared, eps)
    if regime.regime == Regime.CASE1:
        raise RegimeMismatch(f"{regime.describe()}: minorant degenerates, use case1_regularize")
    if regime.regime == Regime.CASE2:
        raise RegimeMismatch(f"{regime.describe()}: hull slopes are capped, use case2_regularize")
    if regime.regime == Regime.INDETERMINATE:
        logger.warning(f"{a.name or 'sequence'}: regime indeterminate, regularizing the window as Standard")
    return _build(a, n, regime, None, eps)


def case1_regularize(
    a: SequenceSpec,
    window: int,
    declared: Optional[RegimeClassification] = None,
    eps: float = DEFAULT_TOLERANCE,
) -> MinorantResult:
    """Case 1: every supporting line of finite slope cuts the sequence, so only a_0 survives."""
    n = a.window(window)
    regime = classify_regime(a, window, declared, eps)
    if regime.regime != Regime.CASE1:
        raise RegimeMismatch(f"{regime.describe()}: case1_regularize needs Case 1 (liminf a_p/p = -inf)")
    a0 = a.log_value(0)
    _check_first_entry([a0])
    return MinorantResult(
        regularized=explicit([a0] + [NEG_INF] * (n - 1), kind=LOG, declared_regime=regime, name=a.name),
        principal_indices=(0,),
        trace=PiecewiseLinearFn(left_value=-a0, domain_hi=NEG_INF),
        regime=regime,
        stable_prefix=n - 1,
        provisional_from=None,
        slopes=(),
        intercepts=(),
        finite_principal=True,
        source=a,
    )


def case2_regularize(
    a: SequenceSpec,
    a_iota: Optional[ExtReal] = None,
    window: int = 64,
    eps: float = DEFAULT_TOLERANCE,
) -> MinorantResult:
    """
    Case 2: the hull is built with slopes strictly below a_iota; past the last
    principal index the sequence is projected onto the slope-a_iota line
    through it.
    """
    n = a.window(window)
    declared = case2(a_iota) if a_iota is not None else None
    regime = classify_regime(a, window, declared, eps)
    if regime.regime == Regime.INDETERMINATE:
        raise UnknownAIota("a_iota cannot be read off an explicit window, declare it")
    if regime.regime != Regime.CASE2:
        raise RegimeMismatch(f"{regime.describe()}: case2_regularize needs Case 2 (finite a_iota)")
    return _build(a, n, regime, regime.a_iota, eps)


def trace_function(
    a: SequenceSpec,
    window: int,
    declared: Optional[RegimeClassification] = None,
    eps: float = DEFAULT_TOLERANCE,
) -> PiecewiseLinearFn:
    """A(k) = sup_p {pk - a_p}, on the real line (Standard) or on (-inf, a_iota) (Case 2)."""
    regime = classify_regime(a, window, declared, eps)
    if regime.regime == Regime.CASE1:
        raise RegimeMismatch(f"{regime.describe()}: the trace is only defined at -inf")
    if regime.regime == Regime.CASE2:
        return case2_regularize(a, regime.a_iota, window, eps).trace
    return convex_minorant(a, window, regime, eps).trace


def reconstruct_from_trace(trace: PiecewiseLinearFn, p: int, regime: Optional[RegimeClassification] = None) -> ExtReal:
    """a~_p = sup_k {kp - A(k)} over the trace domain, limits at open ends included."""
    return trace.legendre_sup(p)


def regularize(
    a: SequenceSpec,
    window: int,
    declared: Optional[RegimeClassification] = None,
    eps: float = DEFAULT_TOLERANCE,
) -> MinorantResult:
    """Dispatches to the construction matching the regime."""
    regime = classify_regime(a, window, declared, eps)
    if regime.regime == Regime.CASE1:
        return case1_regularize(a, window, regime, eps)
    if regime.regime == Regime.CASE2:
        return case2_regularize(a, regime.a_iota, window, eps)
    return convex_minorant(a, window, regime, eps)


def log_convex_minorant(
    M: SequenceSpec,
    window: int,
    declared: Optional[RegimeClassification] = None,
    eps: float = DEFAULT_TOLERANCE,
) -> MinorantResult:
    """M^lc = exp o convex_minorant o log, for every regime."""
    return replace(regularize(M, window, declared, eps), scale=WEIGHT)


def case2_limit_check(
    M: SequenceSpec,
    window: int,
    tolerance: float = 0.05,
    threshold: ExtReal = 2,
    eps: float = DEFAULT_TOLERANCE,
) -> Case2LimitCheck:
    """
    Checks that (M^lc_p)^(1/p) approaches M_iota along the window tail and looks
    for an index where (M_p / M^lc_p)^(1/p) exceeds the threshold, which
    witnesses that M is not equivalent to its log-convex minorant.
    """
    result = log_convex_minorant(M, window, eps=eps)
    if result.regime.regime != Regime.CASE2:
        raise RegimeMismatch(f"{result.regime.describe()}: the limit check needs Case 2")
    a_iota = result.regime.a_iota
    a = to_log_scale(M)
    n = result.window
    lc = result.values
    original = a.log_values(n)

    lo = max(1, n - math.ceil(n / 4))
    deviations = [abs(lc[p] / p - a_iota) for p in range(lo, n)]
    trend = all(less_or_close(later, earlier, eps) for earlier, later in zip(deviations, deviations[1:]))
    deviation = deviations[-1] if deviations else abs(lc[n - 1] / (n - 1) - a_iota)

    log_threshold = ext_log(threshold)
    witness = None
    for p in range(1, n):
        if is_finite(original[p]) and strictly_less(log_threshold, (original[p] - lc[p]) / p, eps):
            witness = p
            break
    bound_holds = all(less_or_close(lc[p], original[0] + ext_mul(a_iota, p), eps) for p in range(n))

    return Case2LimitCheck(
        lim_root_lc=ext_exp(lc[n - 1] / (n - 1)),
        m_iota=ext_exp(a_iota),
        agree=trend and deviation <= tolerance,
        deviation=deviation,
        witness=witness,
        bound_holds=bound_holds,
    )
