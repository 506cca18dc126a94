"""
Lower convex hull of the points S_p = (p, a_p) by the monotone chain.

Points are scanned by increasing index, so the chain can also be grown
incrementally. Collinear points stay on the hull.
"""
import logging
from typing import List, Sequence, Tuple

from core.extreal import DEFAULT_TOLERANCE, ExtReal, as_float, is_exact, is_finite

logger = logging.getLogger(__name__)

Point = Tuple[int, ExtReal]


def orientation(o: Point, a: Point, b: Point, eps: float = DEFAULT_TOLERANCE) -> int:
    """
    Sign of the cross product (a - o) x (b - o): 1 for a left turn, -1 for a
    right turn (a lies strictly above the segment o-b), 0 when collinear.
    Exact for rational points.
    """
    left = (a[0] - o[0]) * (b[1] - o[1])
    right = (a[1] - o[1]) * (b[0] - o[0])
    if is_exact(left) and is_exact(right):
        cross = left - right
        return (cross > 0) - (cross < 0)
    cross = as_float(left) - as_float(right)
    scale = eps * max(1.0, abs(as_float(left)), abs(as_float(right)))
    if cross > scale:
        return 1
    if cross < -scale:
        return -1
    return 0


def edge_slope(a: Point, b: Point) -> ExtReal:
    return (b[1] - a[1]) / (b[0] - a[0])


class LowerHull:
    """Monotone chain kept open on the right so points can be appended one by one."""

    def __init__(self, eps: float = DEFAULT_TOLERANCE):
        self.eps = eps
        self.vertices: List[Point] = []

    def add(self, point: Point) -> List[Point]:
        """Appends a point with a larger index and returns the vertices it removed."""
        if self.vertices and point[0] <= self.vertices[-1][0]:
            raise ValueError("points must be added by increasing index")
        popped = []
        while len(self.vertices) >= 2 and orientation(self.vertices[-2], self.vertices[-1], point, self.eps) < 0:
            popped.append(self.vertices.pop())
        self.vertices.append(point)
        return popped

    @property
    def indices(self) -> List[int]:
        return [p for p, _ in self.vertices]


def lower_hull(values: Sequence[ExtReal], eps: float = DEFAULT_TOLERANCE) -> List[Point]:
    """Hull vertices of the finite points among values[0..n-1]; +inf entries are skipped."""
    hull = LowerHull(eps)
    for p, value in enumerate(values):
        if is_finite(value):
            hull.add((p, value))
    logger.debug(f"lower hull of {len(values)} points has {len(hull.vertices)} vertices")
    return hull.vertices
