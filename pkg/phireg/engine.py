"""
Event-driven sweep for the regularization of a sequence by a function phi.

A point S_q enters the stripe once the slope passes its threshold
theta(q) = inf{t : phi(t) >= q}. Thresholds are non-decreasing in q, so on
[tau_j, tau_{j+1}) the admissible points are a prefix 0..m_j and the trace
A^phi is the conjugate of the lower hull of that prefix. Only the thresholds
and the hull edge slopes are events; nothing is sampled.
"""
import logging
from bisect import bisect_right
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from core.errors import InfiniteEntryUnsupported, InfinityAtZero, NonFiniteEntry, WindowTooShort
from core.extreal import (
    DEFAULT_TOLERANCE,
    INF,
    NEG_INF,
    ExtReal,
    ext_exp,
    ext_mul,
    format_ext,
    is_finite,
    is_neg_inf,
    is_pos_inf,
    less_or_close,
    strictly_less,
)
from core.regime import Regime, RegimeClassification, classify_regime
from core.sequence import LOG, SequenceSpec, explicit, to_log_scale
from minorant.hull import LowerHull, Point, edge_slope
from phireg.phi import RegularizingFunction
from weights.functions import Breakpoint, PiecewiseLinearFn, StepFunction

logger = logging.getLogger(__name__)

INFINITE = "infinite"
FINITE = "finite"
UNDETERMINED = "undetermined"

# tail probes for "+inf from some index on"
TAIL_PROBES = 3


@dataclass(frozen=True)
class PhiInterval:
    start: ExtReal
    end: ExtReal
    closed_right: bool

    def to_dict(self) -> dict:
        return {"start": format_ext(self.start), "end": format_ext(self.end), "closed_right": self.closed_right}


@dataclass(frozen=True)
class Segment:
    slope: ExtReal
    anchor: Tuple[int, ExtReal]
    span: Tuple[int, int]

    def to_dict(self) -> dict:
        return {
            "slope": format_ext(self.slope),
            "anchor": [self.anchor[0], format_ext(self.anchor[1])],
            "span": list(self.span),
        }


@dataclass(frozen=True)
class PhiRegResult:
    regularized: SequenceSpec
    principal_indices: Tuple[int, ...]
    discontinuity_indices: Tuple[int, ...]
    intervals: Tuple[PhiInterval, ...]
    segments: Tuple[Segment, ...]
    counting: StepFunction
    trace: PiecewiseLinearFn
    J_right: ExtReal
    finite_principal: bool
    stable_prefix: int
    provisional_from: Optional[int]
    principal_outlook: str
    regime: RegimeClassification
    phi_name: str
    source: SequenceSpec

    @property
    def values(self) -> List[ExtReal]:
        return list(self.regularized.prefix)

    @property
    def window(self) -> int:
        return len(self.regularized.prefix)

    def weights(self) -> List[ExtReal]:
        principal = set(self.principal_indices)
        return [
            self.source.weight_value(p) if p in principal else ext_exp(x) for p, x in enumerate(self.values)
        ]

    def to_dict(self) -> dict:
        values = self.values
        provisional = values[self.provisional_from :] if self.provisional_from is not None else []
        return {
            "phi": self.phi_name,
            "regularized": [format_ext(x) for x in values[: self.stable_prefix + 1]],
            "provisional": [format_ext(x) for x in provisional],
            "provisional_from": self.provisional_from,
            "stable_prefix": self.stable_prefix,
            "principal_indices": list(self.principal_indices),
            "discontinuity_indices": list(self.discontinuity_indices),
            "intervals": [interval.to_dict() for interval in self.intervals],
            "segments": [segment.to_dict() for segment in self.segments],
            "counting": self.counting.to_dict(),
            "trace": self.trace.to_dict(),
            "J_right": format_ext(self.J_right),
            "finite_principal": self.finite_principal,
            "principal_outlook": self.principal_outlook,
            "regime": self.regime.to_dict(),
        }


def principal_outlook(phi: RegularizingFunction, regime: RegimeClassification, eps: float = DEFAULT_TOLERANCE) -> str:
    """
    Whether the full sequence has infinitely or finitely many principal indices.

    Without blow-up there are always infinitely many. With blow-up at T,
    liminf a_p/p < T gives infinitely many and liminf a_p/p > T finitely many;
    equality is left open.
    """
    if phi.infinite:
        if regime.regime == Regime.STANDARD:
            return INFINITE
        if regime.regime == Regime.CASE1:
            return FINITE
        return UNDETERMINED
    T = phi.blowup_T
    if T is None:
        return INFINITE
    if regime.regime == Regime.STANDARD:
        return FINITE
    if regime.regime == Regime.CASE1:
        return INFINITE
    if regime.regime == Regime.CASE2:
        if strictly_less(regime.a_iota, T, eps):
            return INFINITE
        if strictly_less(T, regime.a_iota, eps):
            return FINITE
    return UNDETERMINED


def check_entries(a: SequenceSpec, n: int, values: Sequence[ExtReal], allow_infinite_tail: bool):
    if is_pos_inf(values[0]):
        raise InfinityAtZero("a_0 = +inf: the sweep has no starting point S_0")
    for p, x in enumerate(values):
        if is_neg_inf(x):
            raise NonFiniteEntry(f"a_{p} = -inf is not a valid input entry")
    if a.is_explicit or allow_infinite_tail:
        return
    try:
        probes = [a.log_value(n * 2**k) for k in range(TAIL_PROBES)]
    except (OverflowError, ValueError, ZeroDivisionError, WindowTooShort):
        return
    if all(is_pos_inf(x) for x in probes):
        raise InfiniteEntryUnsupported(
            "a_p = +inf for all large p needs a regularizing function with a blow-up point"
        )


def _touched(vertices: List[Point], slopes: List[ExtReal], index: int, t: ExtReal, eps: float) -> bool:
    """Whether S_index lies on the lowest line of slope t through the hull vertices."""
    for i, (p, _) in enumerate(vertices):
        if p != index:
            continue
        k_in = slopes[i - 1] if i > 0 else NEG_INF
        k_out = slopes[i] if i < len(slopes) else INF
        return less_or_close(k_in, t, eps) and less_or_close(t, k_out, eps)
    return False


def _current(slopes: List[ExtReal], t: ExtReal, eps: float) -> int:
    """Position of the largest hull vertex on the supporting line of slope t."""
    return sum(1 for k in slopes if less_or_close(k, t, eps))


def _push(breakpoints: List[Breakpoint], x, left, right, slope, eps: float):
    if breakpoints and not strictly_less(breakpoints[-1].x, x, eps):
        last = breakpoints[-1]
        breakpoints[-1] = Breakpoint(last.x, last.left_value, right, slope)
        return
    breakpoints.append(Breakpoint(x, left, right, slope))


def _groups(points: List[Point], phi: RegularizingFunction, cap: ExtReal) -> List[Tuple[ExtReal, List[Point]]]:
    groups: List[Tuple[ExtReal, List[Point]]] = []
    for point in points:
        tau = phi.threshold(point[0])
        if not tau < cap:
            break
        if groups and groups[-1][0] == tau:
            groups[-1][1].append(point)
        else:
            groups.append((tau, [point]))
    return groups


def sweep(
    a: SequenceSpec,
    phi: RegularizingFunction,
    window: int,
    declared: Optional[RegimeClassification] = None,
    eps: float = DEFAULT_TOLERANCE,
) -> PhiRegResult:
    """
    Regularizes a with respect to a regularizing function phi (not the formal phi = +inf).

    Args:
    - a: the sequence, either scale.
    - phi: a validated regularizing function.
    - window: number of leading indices; later points are treated as absent.

    Returns:
    The PhiRegResult. Values whose segment could still change once points
    beyond the window enter the stripe are reported as provisional.
    """
    source = a
    a = to_log_scale(a)
    n = a.window(window)
    values = a.log_values(n)
    cap = phi.blowup_T if phi.blowup_T is not None else INF
    check_entries(a, n, values, phi.blowup_T is not None)
    regime = classify_regime(a, window, declared, eps)

    points = [(p, x) for p, x in enumerate(values) if is_finite(x)]
    groups = _groups(points, phi, cap)
    hull = LowerHull(eps)
    principal: List[int] = []
    first_touch: Dict[int, ExtReal] = {}
    discontinuities: List[int] = []
    breakpoints: List[Breakpoint] = []

    for j, (lo, members) in enumerate(groups):
        hi = groups[j + 1][0] if j + 1 < len(groups) else cap
        previous = None
        if hull.vertices:
            old_slopes = [edge_slope(u, v) for u, v in zip(hull.vertices, hull.vertices[1:])]
            p, ap = hull.vertices[_current(old_slopes, lo, eps)]
            previous = ext_mul(p, lo) - ap
        for point in members:
            hull.add(point)
        vertices = list(hull.vertices)
        slopes = [edge_slope(u, v) for u, v in zip(vertices, vertices[1:])]

        jump = False
        for i, (p, _) in enumerate(vertices):
            k_in = slopes[i - 1] if i > 0 else NEG_INF
            k_out = slopes[i] if i < len(slopes) else INF
            start = k_in if strictly_less(lo, k_in, eps) else lo
            if not strictly_less(start, hi, eps) or strictly_less(k_out, start, eps):
                continue
            if principal and p <= principal[-1]:
                continue
            # a point is only touched once it is inside the stripe
            assert less_or_close(phi.threshold(p), start, eps), f"S_{p} touched before entering the stripe"
            if principal and not _touched(vertices, slopes, principal[-1], start, eps):
                discontinuities.append(p)
                jump = jump or start == lo
            principal.append(p)
            first_touch[p] = start

        i0 = _current(slopes, lo, eps)
        if previous is not None:
            p, ap = vertices[i0]
            value = ext_mul(p, lo) - ap
            _push(breakpoints, lo, previous, value if jump else previous, p, eps)
        for i in range(i0, len(slopes)):
            k = slopes[i]
            if not strictly_less(k, hi, eps):
                break
            p, ap = vertices[i + 1]
            value = ext_mul(p, k) - ap
            _push(breakpoints, k, value, value, p, eps)
        logger.debug(f"event {format_ext(lo)}: {len(members)} point(s) enter, hull has {len(vertices)} vertices")

    trace = PiecewiseLinearFn(left_value=-values[0], breakpoints=tuple(breakpoints), domain_hi=cap)
    outlook = principal_outlook(phi, regime, eps)
    return _assemble(source, a, n, values, phi, regime, cap, principal, first_touch, discontinuities, trace, outlook, eps)


def _assemble(source, a, n, values, phi, regime, cap, principal, first_touch, discontinuities, trace, outlook, eps):
    starts = [first_touch[p] for p in principal]
    discontinuous = set(discontinuities)
    intervals, segments = [], []
    for i, p in enumerate(principal):
        last = i + 1 == len(principal)
        end = cap if last else starts[i + 1]
        intervals.append(PhiInterval(starts[i], end, (not last) and principal[i + 1] not in discontinuous))
        slope = cap if last else starts[i + 1]
        segments.append(Segment(slope, (p, values[p]), (p, n if last else principal[i + 1])))

    regularized = []
    for q in range(n):
        i = bisect_right(principal, q) - 1
        p_i = principal[i]
        if q == p_i:
            regularized.append(values[q])
        elif i + 1 < len(principal):
            regularized.append(values[p_i] + ext_mul(starts[i + 1], q - p_i))
        elif is_finite(cap):
            regularized.append(values[p_i] + ext_mul(cap, q - p_i))
        else:
            regularized.append(INF)

    # everything swept before the first outside point enters the stripe is final
    horizon = phi.threshold(n)
    stable = [p for p, t in zip(principal, starts) if strictly_less(t, horizon, eps)]
    stable_prefix = stable[-1] if stable else 0
    provisional_from = stable_prefix + 1 if stable_prefix < n - 1 else None
    if provisional_from is not None:
        logger.debug(f"{phi.descriptor()}: values from index {provisional_from} are provisional")

    finite_principal = outlook == FINITE or (is_finite(cap) and principal[-1] < n - 1)
    return PhiRegResult(
        regularized=explicit(regularized, kind=LOG, name=a.name),
        principal_indices=tuple(principal),
        discontinuity_indices=tuple(discontinuities),
        intervals=tuple(intervals),
        segments=tuple(segments),
        counting=trace.counting(),
        trace=trace,
        J_right=cap,
        finite_principal=finite_principal,
        stable_prefix=stable_prefix,
        provisional_from=provisional_from,
        principal_outlook=outlook,
        regime=regime,
        phi_name=phi.descriptor(),
        source=source,
    )

