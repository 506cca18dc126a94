"""
The associated function omega_M(t) = sup_p log(M_0 t^p / M_p) and its relatives.

All evaluations go through the log scale a_p = log M_p, so weight sequences far
beyond float range (2^(p^2), (p!)^s) stay usable.
"""
import logging
from bisect import bisect_right
from dataclasses import dataclass
from typing import List, Optional, Tuple

from core.errors import NotLogConvex, OutOfDomain, Unbounded
from core.extreal import (
    DEFAULT_TOLERANCE,
    INF,
    ExtReal,
    close,
    ext_exp,
    ext_log,
    ext_mul,
    is_exact,
    is_pos_inf,
    normalize,
    strictly_less,
)
from core.growth import is_log_convex, log_quotients
from core.regime import Regime, RegimeClassification, classify_regime
from core.sequence import WEIGHT, AffineLog, Geometric, SequenceSpec, explicit, to_log_scale, to_weight_scale
from minorant.construct import regularize
from weights.functions import PiecewiseLinearFn, StepFunction, step_from_counts

logger = logging.getLogger(__name__)

# closed-form tails are re-evaluated on doubled windows while the sup sits at the edge
MAX_EXTENDED_WINDOW = 1 << 16


@dataclass(frozen=True)
class OmegaValue:
    value: ExtReal
    argmax_index: Optional[int]
    boundary_attained: bool


def _check_t(t: ExtReal) -> ExtReal:
    t = normalize(t)
    if t < 0:
        raise OutOfDomain(f"omega is defined for t >= 0, got {t}")
    return t


def _sup_terms(values: List[ExtReal], log_t: ExtReal, start: int = 0) -> Tuple[ExtReal, Optional[int]]:
    """max_p {p log t - a_p} over p >= start; the largest index wins ties."""
    best, best_index = None, None
    for p in range(start, len(values)):
        if is_pos_inf(values[p]):
            continue
        term = ext_mul(p, log_t) - values[p]
        if best is None or term > best:
            best, best_index = term, p
        elif close(term, best):
            best_index = p
    return best, best_index


def _diverges(a: SequenceSpec, regime: RegimeClassification, log_t: ExtReal, eps: float) -> bool:
    if regime.regime == Regime.CASE1:
        return True
    # log t > a_iota: along the liminf subsequence p (log t - a_p/p) -> +inf
    return regime.regime == Regime.CASE2 and not regime.provisional and strictly_less(regime.a_iota, log_t, eps)


def _tail_slope(a: SequenceSpec) -> Optional[ExtReal]:
    """c for tails with a_p = c p, None for the others."""
    if isinstance(a.tail, AffineLog):
        return a.tail.c
    if isinstance(a.tail, Geometric):
        return ext_log(a.tail.d)
    return None


def _window_sup(a: SequenceSpec, window: int, log_t: ExtReal, start: int) -> Tuple[ExtReal, Optional[int], int]:
    n = a.window(window)
    slope = _tail_slope(a)
    if slope is not None and not strictly_less(slope, log_t):
        # p (log t - c) does not increase past the prefix
        n = max(n, len(a.prefix) + 1)
        value, argmax = _sup_terms(a.log_values(n), log_t, start)
        return value, argmax, n
    while True:
        value, argmax = _sup_terms(a.log_values(n), log_t, start)
        if a.is_explicit or argmax is None or argmax < n - 1:
            return value, argmax, n
        if n >= MAX_EXTENDED_WINDOW:
            logger.warning(
                f"sup still attained at index {n - 1} when the window reached {n}; omega may be larger"
            )
            return value, argmax, n
        logger.debug(f"sup attained at the window edge {n - 1}, extending the window to {2 * n}")
        n *= 2


def _log_sup(
    M: SequenceSpec, t: ExtReal, window: int, start: int, eps: float
) -> Tuple[ExtReal, Optional[int], bool]:
    a = to_log_scale(M)
    log_t = ext_log(t)
    if _diverges(a, classify_regime(a, window, eps=eps), log_t, eps):
        return INF, None, False
    value, argmax, n = _window_sup(a, window, log_t, start)
    if value is None:
        return INF, None, False
    boundary = a.is_explicit and n > 1 and argmax == n - 1
    return value, argmax, boundary


def omega_direct(M: SequenceSpec, t: ExtReal, window: int, eps: float = DEFAULT_TOLERANCE) -> OmegaValue:
    """
    omega_M(t) as the supremum over the window.

    Args:
    - M: the weight sequence (a log-scale sequence is read as a = log M).
    - t: the argument, t >= 0.
    - window: number of leading indices searched. Closed-form tails are
      searched further while the maximum sits at the last index.

    Returns:
    The value, the largest maximizing index and whether that index is the
    last one of an explicit sequence (the true value may then be larger).
    For Case 1, and for Case 2 above exp(a_iota), the value is +inf.
    """
    t = _check_t(t)
    if t == 0:
        return OmegaValue(value=normalize(0), argmax_index=0, boundary_attained=False)
    a0 = to_log_scale(M).log_value(0)
    value, argmax, boundary = _log_sup(M, t, window, 0, eps)
    if is_pos_inf(value):
        return OmegaValue(value=INF, argmax_index=None, boundary_attained=False)
    return OmegaValue(value=a0 + value, argmax_index=argmax, boundary_attained=boundary)


def omega_tilde(M: SequenceSpec, t: ExtReal, window: int, eps: float = DEFAULT_TOLERANCE) -> ExtReal:
    """sup_p log(t^p / M_p); at t = 0 only p = 0 contributes, giving -log M_0."""
    t = _check_t(t)
    a = to_log_scale(M)
    if t == 0:
        return -a.log_value(0)
    return _log_sup(a, t, window, 0, eps)[0]


def omega_double_tilde(M: SequenceSpec, t: ExtReal, window: int, eps: float = DEFAULT_TOLERANCE) -> ExtReal:
    """sup over p >= 1 only; tends to -inf as t -> 0, so t = 0 is rejected."""
    t = _check_t(t)
    if t == 0:
        raise OutOfDomain("omega_double_tilde is not defined at t = 0")
    return _log_sup(M, t, window, 1, eps)[0]


def _require_log_convex(M: SequenceSpec, window: int, eps: float):
    check = is_log_convex(M, window, eps)
    if not check.log_convex:
        raise NotLogConvex(f"sequence is not log-convex at index {check.violating_index}", check.violating_index)


def _quotient_domain(M: SequenceSpec, window: int, eps: float) -> Tuple[RegimeClassification, ExtReal]:
    """The regime and the upper end C of the t-range where the quotient formulas hold."""
    regime = classify_regime(M, window, eps=eps)
    if regime.regime == Regime.CASE1:
        raise Unbounded(f"{regime.describe()}: omega_M is +inf for every t > 0")
    if regime.regime == Regime.CASE2:
        return regime, regime.a_iota
    return regime, INF


def _counted_log_quotients(M: SequenceSpec, window: int, log_t: ExtReal) -> Tuple[List[ExtReal], int, SequenceSpec]:
    """Log quotients l_1 <= l_2 <= ... and the number of them that are <= log t."""
    a = to_log_scale(M)
    n = a.window(window)
    while True:
        lq = log_quotients(a, n)[1:]
        count = bisect_right(lq, log_t)
        if a.is_explicit or count < len(lq) or n >= MAX_EXTENDED_WINDOW:
            return lq, count, a
        n *= 2


def omega_piecewise(M: SequenceSpec, t: ExtReal, window: int, eps: float = DEFAULT_TOLERANCE) -> ExtReal:
    """
    omega_M(t) = log(M_0 t^p / M_p) for mu_p <= t < mu_{p+1}, and 0 below mu_1.

    In Case 2 the formula holds only for t < C = exp(a_iota).
    """
    t = _check_t(t)
    _require_log_convex(M, window, eps)
    _, log_c = _quotient_domain(M, window, eps)
    if t == 0:
        return normalize(0)
    log_t = ext_log(t)
    if not strictly_less(log_t, log_c, eps):
        raise OutOfDomain(f"t = {t} is not below C = exp({log_c})")
    _, p, a = _counted_log_quotients(M, window, log_t)
    if p == 0:
        return normalize(0)
    return a.log_value(0) + ext_mul(p, log_t) - a.log_value(p)


def omega_integral(M: SequenceSpec, t: ExtReal, window: int, eps: float = DEFAULT_TOLERANCE) -> ExtReal:
    """
    The integral of Sigma_M(s)/s over [0, t] in closed form: every quotient
    mu_q <= t contributes log(t / mu_q).
    """
    t = _check_t(t)
    _require_log_convex(M, window, eps)
    _, log_c = _quotient_domain(M, window, eps)
    if t == 0:
        return normalize(0)
    log_t = ext_log(t)
    if not strictly_less(log_t, log_c, eps):
        raise OutOfDomain(f"t = {t} is not below C = exp({log_c})")
    lq, p, _ = _counted_log_quotients(M, window, log_t)
    return sum((log_t - lq[q] for q in range(p)), normalize(0))


def counting_function(M: SequenceSpec, window: int, eps: float = DEFAULT_TOLERANCE) -> StepFunction:
    """Sigma_M(t) = #{p >= 1 : mu_p <= t}, restricted to [0, C) in Case 2."""
    _require_log_convex(M, window, eps)
    _, log_c = _quotient_domain(M, window, eps)
    W = to_weight_scale(M)
    a = to_log_scale(M)
    n = a.window(window)
    weights = W.weight_values(n)
    lq = log_quotients(a, n)
    mus = []
    for p in range(1, n):
        if is_exact(weights[p]) and is_exact(weights[p - 1]) and weights[p - 1] != 0:
            mus.append(weights[p] / weights[p - 1])
        else:
            mus.append(ext_exp(lq[p]))
    domain_hi = ext_exp(log_c)
    if domain_hi == INF:
        return step_from_counts(mus, domain_hi)
    return step_from_counts([mu for mu in mus if strictly_less(ext_log(mu), log_c, eps)], domain_hi)


def omega_at_quotient(M: SequenceSpec, p: int, window: int, eps: float = DEFAULT_TOLERANCE) -> ExtReal:
    """omega_M(mu_p) = log(M_0 mu_p^p / M_p) for log-convex M."""
    _require_log_convex(M, window, eps)
    if p == 0:
        return normalize(0)
    a = to_log_scale(M)
    log_mu = a.log_value(p) - a.log_value(p - 1)
    return a.log_value(0) + ext_mul(p, log_mu) - a.log_value(p)


def phi_omega(M: SequenceSpec, window: int, eps: float = DEFAULT_TOLERANCE) -> PiecewiseLinearFn:
    """
    s -> omega_M(e^s) as the upper envelope of the lines s -> ps + a_0 - a_p.

    The envelope only depends on the convex minorant of a, so it is read off
    the minorant's trace and shifted by a_0. In Case 2 the domain is
    (-inf, a_iota).
    """
    result = regularize(M, window, eps=eps)
    if result.regime.regime == Regime.CASE1:
        raise Unbounded(f"{result.regime.describe()}: omega_M is +inf for every t > 0")
    return result.trace.shifted(to_log_scale(M).log_value(0))


def young_conjugate(M: SequenceSpec, p: int, window: int, eps: float = DEFAULT_TOLERANCE) -> ExtReal:
    """sup_s {ps - omega_M(e^s)}, evaluated at the breakpoints of phi_omega and its domain ends."""
    if p < 0:
        raise OutOfDomain(f"Young conjugate is evaluated at integers p >= 0, got {p}")
    return phi_omega(M, window, eps).legendre_sup(p)


def underline_log_values(M: SequenceSpec, window: int, eps: float = DEFAULT_TOLERANCE) -> List[ExtReal]:
    """log of the associated sequence: a_0 + phi*_omega(p)."""
    envelope = phi_omega(M, window, eps)
    a = to_log_scale(M)
    a0 = a.log_value(0)
    return [a0] + [a0 + envelope.legendre_sup(p) for p in range(1, a.window(window))]


def underline_sequence(M: SequenceSpec, window: int, eps: float = DEFAULT_TOLERANCE) -> SequenceSpec:
    """
    underline-M_p = M_0 sup_t t^p / exp(omega_M(t)), an explicit weight
    sequence on the window; the first entry is M_0 itself.
    """
    logs = underline_log_values(M, window, eps)
    weights = [to_weight_scale(M).weight_value(0)] + [ext_exp(x) for x in logs[1:]]
    return explicit(weights, kind=WEIGHT, name=f"{M.name}_underline" if M.name else "")
