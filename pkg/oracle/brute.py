"""
Brute-force references. They work on plain finite lists, share nothing with
the hull or sweep code, and are allowed to be slow.
"""
import logging
from dataclasses import dataclass
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.errors import OracleSelfCheckError
from core.extreal import (
    DEFAULT_TOLERANCE,
    INF,
    ExtReal,
    as_float,
    close,
    ext_log,
    ext_mul,
    is_finite,
    less_or_close,
    normalize,
    strictly_less,
)

logger = logging.getLogger(__name__)

CHUNK_ROWS = 20000
TOUCH_TOLERANCE = 1e-9


def _finite_points(values: Sequence[ExtReal]) -> List[Tuple[int, ExtReal]]:
    return [(q, normalize(x)) for q, x in enumerate(values) if is_finite(x)]


def _admissible(k: ExtReal, d: ExtReal, points, eps: float) -> bool:
    return all(less_or_close(ext_mul(k, q) + d, x, eps) for q, x in points)


def _lines(points, slope_cap: Optional[ExtReal], eps: float) -> List[Tuple[ExtReal, ExtReal]]:
    lines = []
    for (i, x), (j, y) in combinations(points, 2):
        k = (y - x) / (j - i)
        if slope_cap is not None and not strictly_less(k, slope_cap, eps):
            continue
        lines.append((k, x - ext_mul(k, i)))
    if slope_cap is not None:
        lines.extend((slope_cap, x - ext_mul(slope_cap, q)) for q, x in points)
    return [(k, d) for k, d in lines if _admissible(k, d, points, eps)]


def _conjugate(points, slope_cap: Optional[ExtReal]) -> List[Tuple[ExtReal, ExtReal]]:
    """(k, sup_q (qk - a_q)) for every pairwise slope k, plus the cap."""
    slopes = {(y - x) / (j - i) for (i, x), (j, y) in combinations(points, 2)}
    if slope_cap is not None:
        slopes = {k for k in slopes if strictly_less(k, slope_cap)} | {slope_cap}
    return [(k, max(ext_mul(q, k) - x for q, x in points)) for k in slopes]


def brute_minorant(
    values: Sequence[ExtReal], slope_cap: Optional[ExtReal] = None, eps: float = DEFAULT_TOLERANCE
) -> List[ExtReal]:
    """
    The largest convex sequence below values, as the pointwise sup of all
    lines below every finite point. Candidate lines pass through two points,
    or, with a slope cap, have the cap slope and pass through one point; only
    slopes strictly below the cap are admissible, the cap lines being their
    limit. Each value is cross-checked against sup_k {kp - sup_q (qk - a_q)}.

    Args:
    - values: explicit log-scale entries, +inf allowed except at index 0.
    - slope_cap: a_iota for Case 2, None otherwise.

    Returns:
    The minorant on the same indices; +inf past the last finite point when
    there is no cap.
    """
    points = _finite_points(values)
    if not points or points[0][0] != 0:
        raise ValueError("the first entry must be finite")
    if slope_cap is not None:
        slope_cap = normalize(slope_cap)
    last = points[-1][0]
    lines = _lines(points, slope_cap, eps)
    conjugate = _conjugate(points, slope_cap)

    res = []
    for p in range(len(values)):
        if p == 0:
            res.append(points[0][1])
            continue
        if len(points) == 1 and slope_cap is None:
            res.append(INF)
            continue
        if p > last and slope_cap is None:
            res.append(INF)
            continue
        value = max(ext_mul(k, p) + d for k, d in lines)
        check = max(ext_mul(k, p) - trace for k, trace in conjugate)
        if not close(value, check, eps):
            raise OracleSelfCheckError(
                f"line enumeration gives {value} but the double conjugate gives {check} at p = {p}"
            )
        res.append(value)
    return res


def brute_omega(M: Sequence[ExtReal], t: ExtReal, p_max: int, log_limit: Optional[ExtReal] = None) -> ExtReal:
    """
    max over p <= p_max of log(M_0 t^p / M_p).

    With log_limit = liminf log(M_p)/p given, every t > exp(log_limit) gives
    +inf: the terms along the liminf subsequence grow without bound there.
    """
    t = normalize(t)
    if t == 0:
        return normalize(0)
    log_t = ext_log(t)
    if log_limit is not None and log_t > log_limit:
        return INF
    log_m0 = ext_log(M[0])
    best = None
    for p in range(min(p_max, len(M) - 1) + 1):
        term = log_m0 + ext_mul(p, log_t) - ext_log(M[p])
        if best is None or term > best:
            best = term
    return best


def brute_phi_omega(values: Sequence[ExtReal], s: ExtReal) -> ExtReal:
    """max over the finite entries of the lines s -> ps + a_0 - a_p."""
    points = _finite_points(values)
    if not points or points[0][0] != 0:
        raise ValueError("the first entry must be finite")
    a0 = points[0][1]
    return max(ext_mul(p, s) + a0 - x for p, x in points)


@dataclass(frozen=True)
class SweepApproximation:
    principal_indices: Tuple[int, ...]
    discontinuity_indices: Tuple[int, ...]
    jump_locations: Tuple[float, ...]
    regularized: Tuple[float, ...]
    step: float
    min_event_gap: float


def _events(values: np.ndarray, phi, finite: np.ndarray) -> List[float]:
    idx = np.flatnonzero(finite)
    events = []
    for i, j in combinations(idx, 2):
        events.append((values[j] - values[i]) / (j - i))
    for q in range(1, len(values)):
        t = as_float(phi.threshold(q))
        if np.isfinite(t):
            events.append(t)
    T = phi.blowup_T
    if T is not None:
        events = [e for e in events if e < as_float(T)]
    return sorted(events)


def brute_phi_sweep(
    values: Sequence[ExtReal],
    phi,
    step: float,
    lo: Optional[float] = None,
    hi: Optional[float] = None,
) -> SweepApproximation:
    """
    Simulates the phi sweep on the slope grid lo, lo + step, ...: at each t
    the lowest line of slope t through the points S_q with q <= phi(t) is
    found by direct minimization of a_q - qt.

    Returns:
    Principal and discontinuity indices seen on the grid, the jump locations
    of A^phi, and a^phi_p approximated by max {pt - A^phi(t) : phi(t) >= p}
    over the grid. Accuracy is of order step * len(values).
    """
    if not step > 0:
        raise ValueError("grid step must be positive")
    a = np.array([as_float(x) for x in values], dtype=float)
    n = len(a)
    finite = np.isfinite(a)
    q = np.arange(n)
    events = _events(a, phi, finite)
    gaps = np.diff(np.unique(events)) if len(events) > 1 else np.array([np.inf])
    min_gap = float(gaps.min()) if gaps.size else float("inf")
    if lo is None:
        lo = (events[0] if events else 0.0) - 1.0
    if hi is None:
        T = phi.blowup_T
        hi = as_float(T) - step if T is not None else (events[-1] if events else 0.0) + 1.0
    grid = lo + step * np.arange(int(np.floor((hi - lo) / step)) + 1)

    touched_any = np.zeros(n, dtype=bool)
    best = np.full(n, -np.inf)
    discontinuities, jumps = [], []
    previous_A, previous_m = None, None
    for start in range(0, len(grid), CHUNK_ROWS):
        ts = grid[start : start + CHUNK_ROWS]
        phis = phi.evaluate_grid(ts)
        active = (q[None, :] <= phis[:, None]) | (q[None, :] == 0)
        active &= finite[None, :]
        with np.errstate(invalid="ignore"):
            vals = np.where(active, a[None, :] - q[None, :] * ts[:, None], np.inf)
        lowest = vals.min(axis=1)
        touched = vals <= lowest[:, None] + TOUCH_TOLERANCE * np.maximum(1.0, np.abs(lowest))[:, None]
        touched_any |= touched.any(axis=0)
        m = np.where(touched, q[None, :], -1).max(axis=1)
        A = -lowest

        candidates = np.where(q[None, :] <= phis[:, None], q[None, :] * ts[:, None] - A[:, None], -np.inf)
        best = np.maximum(best, candidates.max(axis=0))

        A_all = A if previous_A is None else np.concatenate([[previous_A], A])
        m_all = m if previous_m is None else np.concatenate([[previous_m], m])
        t_all = ts if previous_A is None else np.concatenate([[ts[0] - step], ts])
        rise = np.diff(A_all)
        allowed = step * m_all[1:] + TOUCH_TOLERANCE * np.maximum(1.0, np.abs(A_all[1:]))
        for k in np.flatnonzero(rise > allowed):
            discontinuities.append(int(m_all[k + 1]))
            jumps.append(float(t_all[k + 1]))
        previous_A, previous_m = A[-1], m[-1]

    best[0] = a[0]
    logger.debug(f"grid sweep over {len(grid)} slopes, minimal event gap {min_gap}")
    return SweepApproximation(
        principal_indices=tuple(int(p) for p in np.flatnonzero(touched_any)),
        discontinuity_indices=tuple(sorted(set(discontinuities))),
        jump_locations=tuple(jumps),
        regularized=tuple(float(x) for x in best),
        step=step,
        min_event_gap=min_gap,
    )
