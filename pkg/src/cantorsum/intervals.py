"""Closed intervals, finite interval unions, and outward-rounded enclosures.

`Interval` and `IntervalUnion` are set atoms and carry exact `Fraction`
endpoints whenever the inputs are rational.  `Enclosure` is the float
interval-arithmetic type used to bound functions over boxes; every operation
rounds its result outward so the true range is always contained.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

Real = Union[int, float, Fraction]

# transcendental libm calls are not correctly rounded; widen by one extra ulp
_ULPS_ARITH = 1
_ULPS_TRANSCENDENTAL = 2


def as_exact(x) -> Real:
    """Parse ``x`` into an exact Fraction where possible.

    Strings like ``"1/3"`` or ``"0.4"`` become Fractions, ints stay ints,
    floats are kept as floats.
    """
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    return x


@dataclass(frozen=True, order=True)
class Interval:
    lo: Real
    hi: Real

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"interval endpoints out of order: [{self.lo}, {self.hi}]")

    @property
    def length(self) -> Real:
        return self.hi - self.lo

    @property
    def mid(self) -> Real:
        return (self.lo + self.hi) / 2

    @property
    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    def contains(self, x, open: bool = False) -> bool:
        if open:
            return self.lo < x < self.hi
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def intersect(self, other: "Interval") -> "Interval | None":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            return None
        return Interval(lo, hi)

    def overlaps(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def distance_to(self, x) -> Real:
        if x < self.lo:
            return self.lo - x
        if x > self.hi:
            return x - self.hi
        return 0

    def scaled(self, factor: Real) -> "Interval":
        """Interval with the same midpoint and ``factor`` times the length."""
        m, r = self.mid, self.length / 2 * factor
        return Interval(m - r, m + r)

    def shifted(self, d: Real) -> "Interval":
        return Interval(self.lo + d, self.hi + d)

    def to_float(self) -> tuple[float, float]:
        return float(self.lo), float(self.hi)

    def __repr__(self):
        return f"[{self.lo}, {self.hi}]"


def merge_intervals(intervals: Iterable[Interval]) -> list[Interval]:
    """Sort and merge overlapping or touching intervals."""
    out: list[Interval] = []
    for iv in sorted(intervals):
        if out and iv.lo <= out[-1].hi:
            if iv.hi > out[-1].hi:
                out[-1] = Interval(out[-1].lo, iv.hi)
        else:
            out.append(iv)
    return out


class IntervalUnion:
    """Finite union of disjoint closed intervals (a positive-measure set)."""

    def __init__(self, intervals: Iterable[Interval | Sequence[Real]]):
        ivs = [iv if isinstance(iv, Interval) else Interval(as_exact(iv[0]), as_exact(iv[1]))
               for iv in intervals]
        self.intervals: list[Interval] = merge_intervals(ivs)
        if not self.intervals:
            raise ValueError("empty interval union")
        self.total_length = sum((iv.length for iv in self.intervals), Fraction(0))

    @classmethod
    def parse(cls, text: str) -> "IntervalUnion":
        """Parse ``"[-0.1,0.1]"`` or ``"[0,0.1]u[0.2,0.3]"``."""
        parts = [p for p in text.replace(" ", "").replace("U", "u").split("u") if p]
        ivs = []
        for p in parts:
            lo, hi = p.strip("[]()").split(",")
            ivs.append(Interval(as_exact(lo), as_exact(hi)))
        return cls(ivs)

    @property
    def hull(self) -> Interval:
        return Interval(self.intervals[0].lo, self.intervals[-1].hi)

    def component_containing(self, x) -> Interval | None:
        for iv in self.intervals:
            if iv.contains(x):
                return iv
        return None

    def contains(self, x) -> bool:
        return self.component_containing(x) is not None

    def measure_in(self, window: Interval) -> Real:
        """Lebesgue measure of the union inside ``window``."""
        tot = Fraction(0)
        for iv in self.intervals:
            cut = iv.intersect(window)
            if cut is not None:
                tot += cut.length
        return tot

    def density_deficit(self, window: Interval) -> Real:
        """1 - |U n window| / |window|."""
        if window.length == 0:
            raise ValueError("zero-length window")
        return 1 - self.measure_in(window) / window.length

    def minkowski_sum(self, other: "IntervalUnion") -> "IntervalUnion":
        return IntervalUnion([Interval(a.lo + b.lo, a.hi + b.hi)
                              for a in self.intervals for b in other.intervals])

    def to_list(self) -> list[list[str]]:
        return [[str(iv.lo), str(iv.hi)] for iv in self.intervals]

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def __repr__(self):
        return " u ".join(map(repr, self.intervals))


# ---------------------------------------------------------------------------
# outward-rounded float interval arithmetic


def _down(x: float, n: int = _ULPS_ARITH) -> float:
    for _ in range(n):
        x = math.nextafter(x, -math.inf)
    return x


def _up(x: float, n: int = _ULPS_ARITH) -> float:
    for _ in range(n):
        x = math.nextafter(x, math.inf)
    return x


class Enclosure:
    """A float interval [lo, hi] guaranteed to contain the exact value."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        if hi is None:
            hi = lo
        if isinstance(lo, Fraction):
            lo = _down(float(lo)) if Fraction(float(lo)) > lo else float(lo)
        if isinstance(hi, Fraction):
            hi = _up(float(hi)) if Fraction(float(hi)) < hi else float(hi)
        self.lo = float(lo)
        self.hi = float(hi)
        if self.lo > self.hi:
            raise ValueError(f"bad enclosure [{self.lo}, {self.hi}]")

    @staticmethod
    def _coerce(v) -> "Enclosure":
        return v if isinstance(v, Enclosure) else Enclosure(v)

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mag(self) -> float:
        return max(abs(self.lo), abs(self.hi))

    @property
    def mig(self) -> float:
        if self.lo <= 0 <= self.hi:
            return 0.0
        return min(abs(self.lo), abs(self.hi))

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def hull(self, other) -> "Enclosure":
        o = self._coerce(other)
        return Enclosure(min(self.lo, o.lo), max(self.hi, o.hi))

    def __add__(self, other):
        o = self._coerce(other)
        return Enclosure(_down(self.lo + o.lo), _up(self.hi + o.hi))

    __radd__ = __add__

    def __neg__(self):
        return Enclosure(-self.hi, -self.lo)

    def __sub__(self, other):
        o = self._coerce(other)
        return Enclosure(_down(self.lo - o.hi), _up(self.hi - o.lo))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        p = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Enclosure(_down(min(p)), _up(max(p)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.contains_zero():
            raise ZeroDivisionError("enclosure division by an interval containing 0")
        q = (self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi)
        return Enclosure(_down(min(q)), _up(max(q)))

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Enclosure(0.0, max(-self.lo, self.hi))

    def sqr(self) -> "Enclosure":
        a = abs(self)
        return Enclosure(_down(a.lo * a.lo), _up(a.hi * a.hi))

    def sqrt(self) -> "Enclosure":
        if self.hi < 0:
            raise ValueError("sqrt of negative enclosure")
        lo = max(self.lo, 0.0)
        return Enclosure(max(_down(math.sqrt(lo)), 0.0), _up(math.sqrt(self.hi)))

    def exp(self) -> "Enclosure":
        n = _ULPS_TRANSCENDENTAL
        return Enclosure(max(_down(math.exp(self.lo), n), 0.0), _up(math.exp(self.hi), n))

    def log(self) -> "Enclosure":
        if self.lo <= 0:
            raise ValueError("log of non-positive enclosure")
        n = _ULPS_TRANSCENDENTAL
        return Enclosure(_down(math.log(self.lo), n), _up(math.log(self.hi), n))

    def __pow__(self, p):
        """Real power of a positive base (integer powers allowed for any sign)."""
        if isinstance(p, int) and not isinstance(p, bool):
            if p == 0:
                return Enclosure(1.0)
            if p == 1:
                return self
            if p == 2:
                return self.sqr()
            out = self
            for _ in range(abs(p) - 1):
                out = out * self
            return out if p > 0 else 1.0 / out
        return (self.log() * p).exp()

    def __repr__(self):
        return f"Enclosure({self.lo!r}, {self.hi!r})"


# dispatch helpers so family formulas work on floats and enclosures alike

def sqrt(v):
    return v.sqrt() if isinstance(v, Enclosure) else math.sqrt(v)


def log(v):
    return v.log() if isinstance(v, Enclosure) else math.log(v)


def exp(v):
    return v.exp() if isinstance(v, Enclosure) else math.exp(v)


def power(base, p):
    """``base ** p`` for base > 0; ``p`` may itself be an enclosure."""
    if isinstance(base, Enclosure) or isinstance(p, Enclosure):
        b = base if isinstance(base, Enclosure) else Enclosure(base)
        return (b.log() * p).exp()
    return base ** p
