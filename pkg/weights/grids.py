import numpy as np

from core.errors import ParseError


def _parse_triple(spec: str, flag: str):
    parts = spec.split(":")
    if len(parts) != 3:
        raise ParseError(f"expected start:stop:step, got {spec!r}", field=flag)
    try:
        return tuple(float(x) for x in parts)
    except ValueError as e:
        raise ParseError(f"not a number in {spec!r}", field=flag) from e


def linear_grid(spec: str) -> np.ndarray:
    """'start:stop:step' with stop included when it falls on the grid."""
    start, stop, step = _parse_triple(spec, "--grid")
    if step <= 0 or stop < start:
        raise ParseError(f"empty grid {spec!r}", field="--grid")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def log_grid(spec: str) -> np.ndarray:
    """'start:stop:num' with num points geometrically spaced, start > 0."""
    start, stop, num = _parse_triple(spec, "--loggrid")
    if start <= 0 or stop < start or num < 1 or num != int(num):
        raise ParseError(f"log grid needs 0 < start <= stop and an integer count, got {spec!r}", field="--loggrid")
    return np.geomspace(start, stop, int(num))

