"""
Exact piecewise-linear and step functions on the extended real line.

Both are immutable value objects. Breakpoint coordinates may be Fractions or
floats; evaluation never leaves the number type of its inputs.
"""
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from core.errors import OutOfDomain
from core.extreal import INF, NEG_INF, ExtReal, ext_mul, format_ext, is_neg_inf


@dataclass(frozen=True)
class Breakpoint:
    x: ExtReal
    left_value: ExtReal
    right_value: ExtReal
    slope_right: ExtReal

    @property
    def jump(self) -> bool:
        return self.left_value != self.right_value


@dataclass(frozen=True)
class PiecewiseLinearFn:
    """
    Right-continuous piecewise-linear function on (-inf, domain_hi).

    The function is constant (= left_value) before the first breakpoint, which
    is also its value at -inf. An empty domain is encoded by domain_hi = -inf;
    the value at -inf is still recorded.
    """

    left_value: ExtReal
    breakpoints: Tuple[Breakpoint, ...] = ()
    domain_hi: ExtReal = INF
    _xs: Tuple[ExtReal, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        breakpoints = tuple(self.breakpoints)
        xs = tuple(bp.x for bp in breakpoints)
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", breakpoints)
        object.__setattr__(self, "_xs", xs)

    @property
    def is_empty(self) -> bool:
        return is_neg_inf(self.domain_hi)

    def _piece_value(self, i: int, t: ExtReal) -> ExtReal:
        if i < 0:
            return self.left_value
        bp = self.breakpoints[i]
        return bp.right_value + ext_mul(bp.slope_right, t - bp.x)

    def in_domain(self, t: ExtReal) -> bool:
        return is_neg_inf(t) or t < self.domain_hi

    def __call__(self, t: ExtReal, extended: bool = False) -> ExtReal:
        if is_neg_inf(t):
            return self.left_value
        if not t < self.domain_hi:
            if extended:
                return INF
            raise OutOfDomain(f"t = {format_ext(t)} is outside (-inf, {format_ext(self.domain_hi)})")
        return self._piece_value(bisect_right(self._xs, t) - 1, t)

    def left_limit(self, t: ExtReal) -> ExtReal:
        if is_neg_inf(t):
            return self.left_value
        return self._piece_value(bisect_left(self._xs, t) - 1, t)

    def slope_at(self, t: ExtReal) -> ExtReal:
        """Right derivative; 0 on the leading constant piece."""
        if is_neg_inf(t):
            return 0
        i = bisect_right(self._xs, t) - 1
        return 0 if i < 0 else self.breakpoints[i].slope_right

    @property
    def last_slope(self) -> ExtReal:
        return self.breakpoints[-1].slope_right if self.breakpoints else 0

    def limit_at_hi(self) -> ExtReal:
        if self.is_empty:
            return self.left_value
        if self.domain_hi == INF:
            return INF if self.last_slope > 0 else self._piece_value(len(self.breakpoints) - 1, 0)
        return self.left_limit(self.domain_hi)

    def legendre_sup(self, p, lo: Optional[ExtReal] = None) -> ExtReal:
        """
        Computes sup { p*t - f(t) } over t in [lo, domain_hi), or over
        {-inf} and the whole domain when lo is None or -inf. The supremum is
        taken over breakpoints (right values and left limits) and the two ends,
        so limits that are never attained are included.
        """
        unbounded_left = lo is None or is_neg_inf(lo)
        if self.is_empty:
            return -self.left_value if (p == 0 and unbounded_left) else NEG_INF

        candidates: List[ExtReal] = []
        if unbounded_left:
            if p == 0:
                candidates.append(-self.left_value)
        else:
            if not lo < self.domain_hi:
                return NEG_INF
            candidates.append(ext_mul(p, lo) - self(lo))

        for bp in self.breakpoints:
            if not bp.x < self.domain_hi:
                break
            if unbounded_left or bp.x > lo:
                candidates.append(ext_mul(p, bp.x) - bp.left_value)
                candidates.append(ext_mul(p, bp.x) - bp.right_value)

        if self.domain_hi == INF:
            # the final piece extends to +inf
            if p > self.last_slope:
                return INF
        else:
            candidates.append(ext_mul(p, self.domain_hi) - self.left_limit(self.domain_hi))
        return max(candidates) if candidates else NEG_INF

    def shifted(self, c: ExtReal) -> "PiecewiseLinearFn":
        """t -> f(t) + c."""
        return PiecewiseLinearFn(
            left_value=self.left_value + c,
            breakpoints=tuple(
                Breakpoint(bp.x, bp.left_value + c, bp.right_value + c, bp.slope_right) for bp in self.breakpoints
            ),
            domain_hi=self.domain_hi,
        )

    def counting(self) -> "StepFunction":
        """The right derivative as a step function."""
        jumps, levels = [], []
        level = 0
        for bp in self.breakpoints:
            if bp.slope_right != level:
                jumps.append(bp.x)
                levels.append(bp.slope_right)
                level = bp.slope_right
        return StepFunction(jumps=tuple(jumps), levels=tuple(levels), domain_hi=self.domain_hi)

    def to_dict(self) -> dict:
        return {
            "left_value": format_ext(self.left_value),
            "domain_hi": format_ext(self.domain_hi),
            "breakpoints": [
                {
                    "x": format_ext(bp.x),
                    "left_value": format_ext(bp.left_value),
                    "right_value": format_ext(bp.right_value),
                    "slope_right": format_ext(bp.slope_right),
                }
                for bp in self.breakpoints
            ],
        }


@dataclass(frozen=True)
class StepFunction:
    """Non-decreasing right-continuous integer step function, 0 before the first jump."""

    jumps: Tuple[ExtReal, ...] = ()
    levels: Tuple[int, ...] = ()
    domain_hi: ExtReal = INF

    def __post_init__(self):
        object.__setattr__(self, "jumps", tuple(self.jumps))
        object.__setattr__(self, "levels", tuple(self.levels))
        if len(self.jumps) != len(self.levels):
            raise ValueError("one level per jump")
        if any(b <= a for a, b in zip(self.jumps, self.jumps[1:])):
            raise ValueError("jump locations must be strictly increasing")
        previous = 0
        for level in self.levels:
            if level < previous:
                raise ValueError("step function must be non-decreasing")
            previous = level

    def __call__(self, t: ExtReal) -> int:
        if is_neg_inf(t):
            return 0
        if not t < self.domain_hi:
            raise OutOfDomain(f"t = {format_ext(t)} is outside (-inf, {format_ext(self.domain_hi)})")
        i = bisect_right(self.jumps, t) - 1
        return 0 if i < 0 else self.levels[i]

    def jump_sizes(self) -> List[Tuple[ExtReal, int]]:
        sizes, previous = [], 0
        for x, level in zip(self.jumps, self.levels):
            sizes.append((x, level - previous))
            previous = level
        return sizes

    def to_dict(self) -> dict:
        return {
            "domain_hi": format_ext(self.domain_hi),
            "jumps": [[format_ext(x), level] for x, level in zip(self.jumps, self.levels)],
        }


def step_from_counts(locations: Sequence[ExtReal], domain_hi: ExtReal = INF) -> StepFunction:
    """Counting function t -> #{locations <= t}; repeated locations give larger jumps."""
    jumps, levels = [], []
    for count, x in enumerate(sorted(locations), start=1):
        if jumps and jumps[-1] == x:
            levels[-1] = count
        else:
            jumps.append(x)
            levels.append(count)
    return StepFunction(jumps=tuple(jumps), levels=tuple(levels), domain_hi=domain_hi)
