"""
Regularizing functions phi: non-decreasing, 0 at -inf, +inf at the blow-up
point T (or at +inf) and continuous before it.

The sweep only needs phi through its thresholds theta(q) = inf{t : phi(t) >= q};
every family here inverts itself in closed form so thresholds are exact
whenever the parameters are rational.
"""
import math
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Tuple

import numpy as np

from core.errors import AxiomViolation, ParseError
from core.loader import load_document
from core.extreal import (
    INF,
    NEG_INF,
    ExtReal,
    as_float,
    close,
    ext_exp,
    ext_log,
    format_ext,
    is_finite,
    is_neg_inf,
    normalize,
    parse_ext,
    strictly_less,
)

logger = logging.getLogger(__name__)

# axiom (II): phi(LEFT_PROBE) must already be this small
LEFT_PROBE = -1e9
LEFT_LIMIT = 1e-6
# axiom (III): phi must reach this level before T
LARGE_LEVEL = 10**6
THRESHOLD_PROBES = 6


class RegularizingFunction:
    name = "phi"
    blowup_T: Optional[ExtReal] = None
    infinite = False

    def _value(self, t: ExtReal) -> ExtReal:
        raise NotImplementedError

    def value(self, t: ExtReal) -> ExtReal:
        if is_neg_inf(t):
            return normalize(0)
        if self.blowup_T is not None and not t < self.blowup_T:
            return INF
        try:
            return self._value(t)
        except OverflowError:
            return INF

    __call__ = value

    def threshold(self, q: int) -> ExtReal:
        """inf{t : phi(t) >= q}; -inf for q <= 0."""
        if q <= 0:
            return NEG_INF
        return self._threshold(q)

    def _threshold(self, q: int) -> ExtReal:
        raise NotImplementedError

    def evaluate_grid(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        return np.array([as_float(self.value(float(t))) for t in ts])

    def descriptor(self) -> str:
        return self.name

    def to_dict(self) -> dict:
        res = {"phi": self.descriptor(), "infinite": self.infinite}
        res["blowup_T"] = None if self.blowup_T is None else format_ext(self.blowup_T)
        return res


@dataclass(frozen=True, eq=False)
class ExpPhi(RegularizingFunction):
    """phi(t) = e^t, the exponential regularization."""

    name = "exp"

    def _value(self, t):
        return ext_exp(t)

    def _threshold(self, q):
        return ext_log(q)

    def evaluate_grid(self, ts):
        with np.errstate(over="ignore"):
            return np.exp(np.asarray(ts, dtype=float))


@dataclass(frozen=True, eq=False)
class ExpAffinePhi(RegularizingFunction):
    alpha: ExtReal = Fraction(1)
    beta: ExtReal = Fraction(0)
    name = "expaffine"

    def __post_init__(self):
        object.__setattr__(self, "alpha", normalize(self.alpha))
        object.__setattr__(self, "beta", normalize(self.beta))
        if not self.alpha > 0:
            raise AxiomViolation("I", LEFT_PROBE, f"alpha = {self.alpha} must be positive")

    def _value(self, t):
        return ext_exp(self.alpha * t + self.beta)

    def _threshold(self, q):
        return (ext_log(q) - self.beta) / self.alpha

    def evaluate_grid(self, ts):
        with np.errstate(over="ignore"):
            return np.exp(as_float(self.alpha) * np.asarray(ts, dtype=float) + as_float(self.beta))

    def descriptor(self):
        return f"expaffine:{format_ext(self.alpha)},{format_ext(self.beta)}"


@dataclass(frozen=True, eq=False)
class BlowupReciprocalPhi(RegularizingFunction):
    """phi(t) = 1/(T - t) for t < T and +inf from T on."""

    T: ExtReal = Fraction(0)
    name = "blowup"

    def __post_init__(self):
        object.__setattr__(self, "T", normalize(self.T))
        if not is_finite(self.T):
            raise ParseError("blow-up point must be finite", field="phi")

    @property
    def blowup_T(self):
        return self.T

    def _value(self, t):
        return 1 / (self.T - t)

    def _threshold(self, q):
        return self.T - Fraction(1, q)

    def evaluate_grid(self, ts):
        ts = np.asarray(ts, dtype=float)
        gap = as_float(self.T) - ts
        with np.errstate(divide="ignore"):
            return np.where(gap > 0, 1.0 / np.where(gap > 0, gap, 1.0), np.inf)

    def descriptor(self):
        return f"blowup:{format_ext(self.T)}"


@dataclass(frozen=True, eq=False)
class PiecewisePhi(RegularizingFunction):
    """
    Linear interpolation through knots (x_i, v_i), constant v_0 = 0 to the
    left of the first knot and extended with the last slope to the right.
    """

    knots: Tuple[Tuple[ExtReal, ExtReal], ...] = ()
    name = "piecewise"
    _xs: Tuple[ExtReal, ...] = field(init=False, repr=False)

    def __post_init__(self):
        knots = tuple((normalize(x), normalize(v)) for x, v in self.knots)
        if len(knots) < 2:
            raise ParseError("piecewise phi needs at least two knots", field="phi.knots")
        for (x0, v0), (x1, v1) in zip(knots, knots[1:]):
            if not x0 < x1:
                raise ParseError(f"knot abscissae must increase, got {x0} then {x1}", field="phi.knots")
            if v1 < v0:
                raise AxiomViolation("I", x1, f"phi drops from {format_ext(v0)} to {format_ext(v1)}")
        if knots[0][1] != 0:
            raise AxiomViolation("II", knots[0][0], "phi must vanish left of the first knot")
        if not knots[-1][1] > knots[-2][1]:
            raise AxiomViolation("III", knots[-1][0], "the last piece must increase to reach +inf")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "_xs", tuple(x for x, _ in knots))

    def _slope(self, i: int) -> ExtReal:
        (x0, v0), (x1, v1) = self.knots[i], self.knots[i + 1]
        return (v1 - v0) / (x1 - x0)

    def _value(self, t):
        if t <= self.knots[0][0]:
            return self.knots[0][1]
        for i in range(len(self.knots) - 1):
            x0, v0 = self.knots[i]
            if t <= self.knots[i + 1][0]:
                return v0 + self._slope(i) * (t - x0)
        x, v = self.knots[-1]
        return v + self._slope(len(self.knots) - 2) * (t - x)

    def _threshold(self, q):
        for i in range(len(self.knots) - 1):
            x0, v0 = self.knots[i]
            x1, v1 = self.knots[i + 1]
            if v1 >= q:
                return x0 + (q - v0) * (x1 - x0) / (v1 - v0)
        x, v = self.knots[-1]
        return x + (q - v) / self._slope(len(self.knots) - 2)

    def evaluate_grid(self, ts):
        ts = np.asarray(ts, dtype=float)
        xs = np.array([as_float(x) for x in self._xs])
        vs = np.array([as_float(v) for _, v in self.knots])
        res = np.interp(ts, xs, vs)
        right = ts > xs[-1]
        slope = (vs[-1] - vs[-2]) / (xs[-1] - xs[-2])
        res[right] = vs[-1] + slope * (ts[right] - xs[-1])
        return res

    def descriptor(self):
        return "piecewise:" + ";".join(f"{format_ext(x)}:{format_ext(v)}" for x, v in self.knots)


@dataclass(frozen=True, eq=False)
class InfinitePhi(RegularizingFunction):
    """phi = +inf: formally not a regularizing function; reduces to the convex minorant."""

    name = "infinite"
    infinite = True

    def value(self, t):
        return INF

    __call__ = value

    def threshold(self, q):
        return NEG_INF

    def evaluate_grid(self, ts):
        return np.full(np.shape(ts), np.inf)


@dataclass(frozen=True, eq=False)
class ReparametrizedPhi(RegularizingFunction):
    """phi o psi^-1 for an increasing bijection psi of the slope axis."""

    base: RegularizingFunction = field(default_factory=ExpPhi)
    psi: Callable = lambda t: t
    psi_inverse: Callable = lambda t: t
    label: str = ""

    @property
    def name(self):
        return self.label or f"reparametrized({self.base.descriptor()})"

    @property
    def infinite(self):
        return self.base.infinite

    @property
    def blowup_T(self):
        T = self.base.blowup_T
        return None if T is None else self.psi(T)

    def _map(self, t):
        return t if not is_finite(t) else self.psi(t)

    def value(self, t):
        if not is_finite(t):
            return self.base.value(t)
        return self.base.value(self.psi_inverse(t))

    __call__ = value

    def threshold(self, q):
        return self._map(self.base.threshold(q))

    def descriptor(self):
        return self.name


def reparametrize(phi: RegularizingFunction, psi: Callable, psi_inverse: Callable, label: str = "") -> RegularizingFunction:
    """Sweeping slopes psi(t) under phi is sweeping t under phi o psi^-1."""
    return validate_phi(ReparametrizedPhi(base=phi, psi=psi, psi_inverse=psi_inverse, label=label))


def _probe_grid(phi: RegularizingFunction) -> np.ndarray:
    T = phi.blowup_T
    if T is None:
        return np.linspace(-50.0, 50.0, 2001)
    hi = as_float(T)
    return hi - np.geomspace(1e3, 1e-6, 2001)


def validate_phi(phi: RegularizingFunction) -> RegularizingFunction:
    """
    Checks the four axioms on a probe grid.

    Returns:
    phi itself; raises AxiomViolation naming the first failed axiom and a witness t.
    """
    if phi.infinite:
        return phi
    grid = _probe_grid(phi)
    values = np.array([as_float(phi.value(float(t))) for t in grid])
    if np.any(values < 0):
        witness = float(grid[np.argmax(values < 0)])
        raise AxiomViolation("I", witness, "phi takes negative values")
    with np.errstate(invalid="ignore"):
        drops = np.diff(values) < -1e-12 * np.maximum(1.0, np.abs(values[:-1]))
    if np.any(drops):
        raise AxiomViolation("I", float(grid[np.argmax(drops) + 1]), "phi decreases")

    if as_float(phi.value(LEFT_PROBE)) > LEFT_LIMIT:
        raise AxiomViolation("II", LEFT_PROBE, "phi does not vanish at -inf")

    level = phi.threshold(LARGE_LEVEL)
    if not is_finite(level) or (phi.blowup_T is not None and not strictly_less(level, phi.blowup_T)):
        witness = as_float(phi.blowup_T) if phi.blowup_T is not None else math.inf
        raise AxiomViolation("III", witness, "phi stays bounded")

    for q in range(1, THRESHOLD_PROBES + 1):
        t = phi.threshold(q)
        if not close(phi.value(t), q, 1e-6):
            raise AxiomViolation("IV", as_float(t), f"phi(threshold({q})) = {as_float(phi.value(t))}")
    logger.debug(f"validated {phi.descriptor()}")
    return phi


def _numbers(raw: str, count: int, what: str):
    parts = [x for x in raw.split(",") if x.strip()]
    if len(parts) != count:
        raise ParseError(f"{what} expects {count} parameters, got {raw!r}", field="phi")
    try:
        return [parse_ext(x) for x in parts]
    except ValueError as e:
        raise ParseError(str(e), field="phi") from e


def _knots(raw) -> Tuple[Tuple[ExtReal, ExtReal], ...]:
    try:
        return tuple((parse_ext(x), parse_ext(v)) for x, v in raw)
    except (TypeError, ValueError) as e:
        raise ParseError(f"knots must be [x, value] pairs: {e}", field="phi.knots") from e


def _from_dict(descriptor: dict) -> RegularizingFunction:
    kind = str(descriptor.get("type", "")).lower()
    try:
        if kind == "exp":
            return ExpPhi()
        if kind == "expaffine":
            return ExpAffinePhi(parse_ext(descriptor["alpha"]), parse_ext(descriptor.get("beta", 0)))
        if kind == "blowup":
            return BlowupReciprocalPhi(parse_ext(descriptor["T"]))
        if kind == "infinite":
            return InfinitePhi()
        if kind == "piecewise":
            return PiecewisePhi(_knots(descriptor["knots"]))
    except KeyError as e:
        raise ParseError(f"missing parameter {e}", field="phi") from e
    raise ParseError(f"unknown regularizing function {kind!r}", field="phi.type")


def _from_string(descriptor: str) -> RegularizingFunction:
    kind, _, rest = descriptor.strip().partition(":")
    kind = kind.lower()
    if kind == "exp":
        return ExpPhi()
    if kind == "expaffine":
        return ExpAffinePhi(*_numbers(rest, 2, "expaffine"))
    if kind == "blowup":
        return BlowupReciprocalPhi(*_numbers(rest, 1, "blowup"))
    if kind == "infinite":
        return InfinitePhi()
    if kind == "piecewise":
        if not rest:
            raise ParseError("piecewise needs a knot file", field="phi")
        document = load_document(rest)
        return PiecewisePhi(_knots(document.get("knots", []) if isinstance(document, dict) else document))
    raise ParseError(f"unknown regularizing function {descriptor!r}", field="phi")


def make_phi(descriptor) -> RegularizingFunction:
    """
    Builds and validates a regularizing function.

    Args:
    - descriptor: "exp", "expaffine:alpha,beta", "blowup:T", "infinite",
      "piecewise:<knot file>", or the equivalent dict with a "type" key.

    Returns:
    The RegularizingFunction; AxiomViolation if it fails an axiom.
    """
    if isinstance(descriptor, RegularizingFunction):
        return validate_phi(descriptor)
    if isinstance(descriptor, dict):
        return validate_phi(_from_dict(descriptor))
    return validate_phi(_from_string(str(descriptor)))
