import math
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from core.errors import WindowTooShort
from core.extreal import (
    ExtReal,
    ext_exp,
    ext_log,
    ext_mul,
    is_exact,
    is_finite,
    normalize,
)

logger = logging.getLogger(__name__)

LOG = "log"
WEIGHT = "weight"
KINDS = (LOG, WEIGHT)


class TailRule:
    """
    Describes the values of a sequence beyond its explicit prefix.

    Each rule has a natural scale and evaluates on both scales; the
    SequenceSpec owning it picks the one matching its kind.
    """

    name = "explicit_only"

    def log_value(self, p: int) -> ExtReal:
        raise NotImplementedError

    def weight_value(self, p: int) -> ExtReal:
        raise NotImplementedError

    def to_dict(self) -> dict:
        return {"type": self.name}


@dataclass(frozen=True)
class ExplicitOnly(TailRule):
    name = "explicit_only"

    def log_value(self, p: int) -> ExtReal:
        raise WindowTooShort(f"index {p} lies beyond the explicit prefix")

    def weight_value(self, p: int) -> ExtReal:
        raise WindowTooShort(f"index {p} lies beyond the explicit prefix")


@dataclass(frozen=True)
class FactorialPower(TailRule):
    """M_p = c * (p!)^s."""

    s: Fraction
    c: Fraction = Fraction(1)
    name = "factorial_power"

    def __post_init__(self):
        object.__setattr__(self, "s", normalize(self.s))
        object.__setattr__(self, "c", normalize(self.c))
        if not self.s > 0 or not self.c > 0:
            raise ValueError("factorial_power needs s > 0 and c > 0")

    def weight_value(self, p: int) -> ExtReal:
        if is_exact(self.s) and Fraction(self.s).denominator == 1 and is_exact(self.c):
            return self.c * Fraction(math.factorial(p)) ** int(self.s)
        return ext_exp(self.log_value(p))

    def log_value(self, p: int) -> ExtReal:
        return ext_log(self.c) + ext_mul(self.s, ext_log(Fraction(math.factorial(p))))

    def to_dict(self) -> dict:
        return {"type": self.name, "s": self.s, "c": self.c}


@dataclass(frozen=True)
class Geometric(TailRule):
    """M_p = d^p."""

    d: Fraction
    name = "geometric"

    def __post_init__(self):
        object.__setattr__(self, "d", normalize(self.d))
        if not self.d > 0 or not is_finite(self.d):
            raise ValueError("geometric needs a finite d > 0")

    def weight_value(self, p: int) -> ExtReal:
        if is_exact(self.d):
            return Fraction(self.d) ** p
        return ext_exp(self.log_value(p))

    def log_value(self, p: int) -> ExtReal:
        return ext_mul(p, ext_log(self.d))

    def to_dict(self) -> dict:
        return {"type": self.name, "d": self.d}


@dataclass(frozen=True)
class AffineLog(TailRule):
    """a_p = c * p."""

    c: Fraction
    name = "affine_log"

    def __post_init__(self):
        object.__setattr__(self, "c", normalize(self.c))
        if not is_finite(self.c):
            raise ValueError("affine_log needs a finite c")

    def log_value(self, p: int) -> ExtReal:
        return ext_mul(p, self.c)

    def weight_value(self, p: int) -> ExtReal:
        return ext_exp(self.log_value(p))

    def to_dict(self) -> dict:
        return {"type": self.name, "c": self.c}


@dataclass(frozen=True)
class Expression(TailRule):
    """A closed-form evaluator p -> value on its own scale."""

    fn: Callable[[int], ExtReal]
    scale: str = LOG
    source: str = ""
    name = "expression"

    def __post_init__(self):
        if self.scale not in KINDS:
            raise ValueError(f"unknown expression scale {self.scale!r}")

    def log_value(self, p: int) -> ExtReal:
        value = normalize(self.fn(p))
        return value if self.scale == LOG else ext_log(value)

    def weight_value(self, p: int) -> ExtReal:
        value = normalize(self.fn(p))
        return value if self.scale == WEIGHT else ext_exp(value)

    def to_dict(self) -> dict:
        return {"type": self.name, "scale": self.scale, "expression": self.source}


@dataclass(frozen=True)
class SequenceSpec:
    """
    An infinite sequence a (log scale) or M (weight scale), given by an
    explicit prefix and a TailRule for every index past it.
    """

    prefix: Tuple[ExtReal, ...]
    tail: TailRule = field(default_factory=ExplicitOnly)
    kind: str = LOG
    declared_regime: Optional[object] = None
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown sequence kind {self.kind!r}")
        values = tuple(normalize(x) for x in self.prefix)
        if self.kind == WEIGHT and any(x < 0 for x in values):
            raise ValueError("weight-scale entries must be non-negative")
        object.__setattr__(self, "prefix", values)

    @property
    def is_explicit(self) -> bool:
        return isinstance(self.tail, ExplicitOnly)

    def value(self, p: int) -> ExtReal:
        if p < 0:
            raise IndexError(f"negative index {p}")
        if p < len(self.prefix):
            return self.prefix[p]
        if self.kind == LOG:
            return self.tail.log_value(p)
        return self.tail.weight_value(p)

    def log_value(self, p: int) -> ExtReal:
        if p < len(self.prefix):
            x = self.prefix[p]
            return x if self.kind == LOG else ext_log(x)
        return self.tail.log_value(p)

    def weight_value(self, p: int) -> ExtReal:
        if p < len(self.prefix):
            x = self.prefix[p]
            return x if self.kind == WEIGHT else ext_exp(x)
        return self.tail.weight_value(p)

    def values(self, n: int) -> List[ExtReal]:
        return [self.value(p) for p in range(n)]

    def log_values(self, n: int) -> List[ExtReal]:
        return [self.log_value(p) for p in range(n)]

    def weight_values(self, n: int) -> List[ExtReal]:
        return [self.weight_value(p) for p in range(n)]

    def window(self, window: int) -> int:
        """Number of indices actually available: explicit sequences stop at their prefix."""
        if window < 1:
            raise WindowTooShort(f"window must contain at least one index, got {window}")
        if self.is_explicit and window > len(self.prefix):
            logger.debug(f"window {window} truncated to the explicit prefix ({len(self.prefix)})")
            return len(self.prefix)
        return window

    def with_prefix(self, values: Sequence[ExtReal], keep_tail: bool = True) -> "SequenceSpec":
        return SequenceSpec(
            prefix=tuple(values),
            tail=self.tail if keep_tail else ExplicitOnly(),
            kind=self.kind,
            declared_regime=self.declared_regime,
            name=self.name,
        )


def explicit(values: Sequence, kind: str = LOG, declared_regime=None, name: str = "") -> SequenceSpec:
    return SequenceSpec(prefix=tuple(values), kind=kind, declared_regime=declared_regime, name=name)


def to_log_scale(M: SequenceSpec) -> SequenceSpec:
    """a_p = log M_p elementwise, log(+inf) = +inf; the tail rule is shared."""
    if M.kind == LOG:
        return M
    return SequenceSpec(
        prefix=tuple(ext_log(x) for x in M.prefix),
        tail=M.tail,
        kind=LOG,
        declared_regime=M.declared_regime,
        name=M.name,
    )


def to_weight_scale(a: SequenceSpec) -> SequenceSpec:
    if a.kind == WEIGHT:
        return a
    return SequenceSpec(
        prefix=tuple(ext_exp(x) for x in a.prefix),
        tail=a.tail,
        kind=WEIGHT,
        declared_regime=a.declared_regime,
        name=a.name,
    )

