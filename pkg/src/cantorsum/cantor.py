"""Finite-generation covers of Cantor sets.

A `CantorApprox` is either *self-similar* (an affine copy ``offset + scale*C_g``
of the symmetric Cantor set, whose cover at any depth can be produced lazily)
or *explicit* (a fixed list of disjoint closed intervals).  Endpoints of
self-similar covers are exact `Fraction`s.
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Sequence

from .errors import EmptyIntersectionError, PreconditionError
from .intervals import Interval, Real, as_exact

SOURCES = ("self-similar", "explicit", "restriction", "image")

# γ = 1/3 at depth 16 gives cells of width 3**-16 ~ 2.3e-8
DEFAULT_DEPTH = 16


@dataclass(frozen=True)
class Gap:
    interval: Interval
    bounded: bool
    level: int | None = None

    @property
    def length(self):
        return self.interval.length if self.bounded else math.inf


@dataclass(frozen=True)
class Location:
    """Where a point sits relative to a cover: in a cover interval ("set"),
    in a bounded gap ("gap"), or outside the hull ("left"/"right")."""

    kind: str
    interval: Interval | None = None
    level: int | None = None

    @property
    def width(self):
        return self.interval.length if self.interval is not None else math.inf


def _check_gamma(gamma) -> Fraction:
    g = as_exact(gamma)
    if not 0 < g < Fraction(1, 2):
        raise PreconditionError(f"gamma must lie in (0, 1/2), got {gamma}")
    return g


class CantorApprox:
    """Depth-``depth`` interval cover of a Cantor set."""

    def __init__(self, intervals: Sequence[Interval] | None = None, *, depth: int = 0,
                 source: str = "explicit", gamma: Fraction | None = None,
                 offset: Real = 0, scale: Real = 1, allow_degenerate: bool = False):
        if source not in SOURCES:
            raise ValueError(f"unknown source tag {source!r}")
        if depth < 0:
            raise ValueError("depth must be >= 0")
        self.depth = depth
        self.source = source
        self.gamma = gamma
        self.offset = offset
        self.scale = scale
        if gamma is None:
            if not intervals:
                raise EmptyIntersectionError("a Cantor approximation needs at least one interval")
            ivs = sorted(intervals)
            for a, b in zip(ivs, ivs[1:]):
                if a.hi >= b.lo:
                    raise ValueError(f"intervals {a} and {b} are not disjoint")
            if not allow_degenerate and any(iv.is_degenerate for iv in ivs):
                raise ValueError("degenerate interval in cover (pass allow_degenerate=True)")
            self.__dict__["intervals"] = ivs
            self.hull = Interval(ivs[0].lo, ivs[-1].hi)
        else:
            self.hull = Interval(offset, offset + scale)

    # -- constructors -----------------------------------------------------

    @classmethod
    def self_similar(cls, gamma, depth: int = DEFAULT_DEPTH, offset: Real = 0,
                     scale: Real = 1, source: str = "self-similar") -> "CantorApprox":
        g = _check_gamma(gamma)
        return cls(depth=depth, source=source, gamma=g, offset=as_exact(offset),
                   scale=as_exact(scale))

    @classmethod
    def explicit(cls, intervals, depth: int = 0, allow_degenerate: bool = False,
                 source: str = "explicit") -> "CantorApprox":
        ivs = [iv if isinstance(iv, Interval) else Interval(as_exact(iv[0]), as_exact(iv[1]))
               for iv in intervals]
        return cls(ivs, depth=depth, source=source, allow_degenerate=allow_degenerate)

    # -- structure --------------------------------------------------------

    @property
    def is_self_similar(self) -> bool:
        return self.gamma is not None

    @cached_property
    def intervals(self) -> list[Interval]:
        # only reached for self-similar sets; explicit lists are stored eagerly
        g, n = self.gamma, self.depth
        p, q = g.numerator, g.denominator
        # integer positions with common denominator q**n, relative to the hull
        lefts = [0]
        for k in range(1, n + 1):
            # parent length γ^(k-1), right child starts (1-γ)γ^(k-1) further
            step = (q - p) * p ** (k - 1) * q ** (n - k)
            lefts = [x for l in lefts for x in (l, l + step)]
        den = q ** n
        length = self.scale * Fraction(p ** n, den)
        return [Interval(self.offset + self.scale * Fraction(l, den),
                         self.offset + self.scale * Fraction(l, den) + length) for l in lefts]

    def __len__(self):
        if self.is_self_similar:
            return 2 ** self.depth
        return len(self.intervals)

    def with_depth(self, depth: int) -> "CantorApprox":
        if not self.is_self_similar:
            raise PreconditionError("only self-similar approximations can be re-generated")
        return CantorApprox(depth=depth, source=self.source, gamma=self.gamma,
                            offset=self.offset, scale=self.scale)

    def deepen(self, k: int = 2) -> "CantorApprox":
        return self.with_depth(self.depth + k)

    def translated(self, d: Real) -> "CantorApprox":
        d = as_exact(d)
        if self.is_self_similar:
            return CantorApprox(depth=self.depth, source=self.source, gamma=self.gamma,
                                offset=self.offset + d, scale=self.scale)
        return CantorApprox([iv.shifted(d) for iv in self.intervals], depth=self.depth,
                            source=self.source, allow_degenerate=True)

    def reflected(self) -> "CantorApprox":
        """Image under x -> -x."""
        if self.is_self_similar:
            # C_γ is symmetric under x -> 1-x, so -(o + sC) = (-o - s) + sC
            return CantorApprox(depth=self.depth, source=self.source, gamma=self.gamma,
                                offset=-self.offset - self.scale, scale=self.scale)
        return CantorApprox([Interval(-iv.hi, -iv.lo) for iv in self.intervals],
                            depth=self.depth, source=self.source, allow_degenerate=True)

    def cylinder(self, u: Real, length: Real, side: str) -> "CantorApprox":
        """The cylinder ``[u, u+length]`` (side="right") or ``[u-length, u]``.

        ``u`` must be an endpoint of a cover interval and ``length`` one of the
        self-similar scales, so that the piece is again an affine copy of C_γ.
        """
        if not self.is_self_similar:
            raise PreconditionError("cylinders exist only for self-similar sets")
        lo = u if side == "right" else u - length
        target = Interval(lo, lo + length)
        off, L = self.offset, self.scale
        level = 0
        while L > length:
            left = Interval(off, off + self.gamma * L)
            right = Interval(off + L - self.gamma * L, off + L)
            if left.contains_interval(target):
                L = left.length
            elif right.contains_interval(target):
                off, L = right.lo, right.length
            else:
                break
            level += 1
        if off != target.lo or L != length:
            raise PreconditionError(f"{target} is not a cylinder of this Cantor set")
        return CantorApprox(depth=max(self.depth - level, 0), source="restriction",
                            gamma=self.gamma, offset=off, scale=L)

    # -- queries ----------------------------------------------------------

    def gaps(self) -> list[Gap]:
        """Bounded gaps between consecutive cover intervals, plus the two
        unbounded components, sorted left to right."""
        ivs = self.intervals
        out = [Gap(Interval(-math.inf, ivs[0].lo), False)]
        out += [Gap(Interval(a.hi, b.lo), True) for a, b in zip(ivs, ivs[1:])]
        out.append(Gap(Interval(ivs[-1].hi, math.inf), False))
        return out

    def bounded_gaps(self) -> list[Interval]:
        ivs = self.intervals
        return [Interval(a.hi, b.lo) for a, b in zip(ivs, ivs[1:])]

    def iter_gaps_by_size(self, max_level: int | None = None) -> Iterator[Gap]:
        """Bounded gaps, largest first.

        For self-similar sets the enumeration is lazy and level-by-level, so
        ``max_level`` may exceed the materialised depth.
        """
        if not self.is_self_similar:
            for g in sorted(self.bounded_gaps(), key=lambda iv: (-iv.length, iv.lo)):
                yield Gap(g, True)
            return
        top = self.depth if max_level is None else max_level
        g = self.gamma
        level_cyl = [(self.offset, self.scale)]
        for k in range(1, top + 1):
            nxt = []
            for off, L in level_cyl:
                a, b = off + g * L, off + L - g * L
                yield Gap(Interval(a, b), True, k)
                nxt.append((off, g * L))
                nxt.append((b, g * L))
            level_cyl = nxt

    def locate(self, x, depth: int | None = None) -> Location:
        """Classify ``x`` against the cover at ``depth`` (default: own depth)."""
        if x < self.hull.lo:
            return Location("left")
        if x > self.hull.hi:
            return Location("right")
        if not self.is_self_similar:
            ivs = self.intervals
            i = bisect.bisect_right([iv.lo for iv in ivs], x) - 1
            if ivs[i].contains(x):
                return Location("set", ivs[i], self.depth)
            return Location("gap", Interval(ivs[i].hi, ivs[i + 1].lo))
        n = self.depth if depth is None else depth
        g = self.gamma
        off, L = self.offset, self.scale
        for k in range(1, n + 1):
            a = off + g * L
            b = off + L - g * L
            if x <= a:
                L = g * L
            elif x >= b:
                off, L = b, g * L
            else:
                return Location("gap", Interval(a, b), k)
        return Location("set", Interval(off, off + L), n)

    def cell_width(self, depth: int | None = None) -> Real:
        if not self.is_self_similar:
            return max(iv.length for iv in self.intervals)
        n = self.depth if depth is None else depth
        return self.scale * self.gamma ** n

    # -- serialisation ----------------------------------------------------

    def to_dict(self) -> dict:
        d = {
            "gamma": str(self.gamma) if self.gamma is not None else None,
            "depth": self.depth,
            "intervals": [[str(iv.lo), str(iv.hi)] for iv in self.intervals],
        }
        if self.is_self_similar and (self.offset != 0 or self.scale != 1):
            d["offset"] = str(self.offset)
            d["scale"] = str(self.scale)
        d["source"] = self.source
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "CantorApprox":
        source = d.get("source", "explicit")
        if d.get("gamma") is not None:
            return cls(depth=int(d["depth"]), source=source if source != "explicit" else "self-similar",
                       gamma=_check_gamma(d["gamma"]), offset=as_exact(d.get("offset", "0")),
                       scale=as_exact(d.get("scale", "1")))
        ivs = [Interval(as_exact(lo), as_exact(hi)) for lo, hi in d["intervals"]]
        return cls(ivs, depth=int(d.get("depth", 0)), source=source, allow_degenerate=True)

    @classmethod
    def from_json(cls, text: str) -> "CantorApprox":
        return cls.from_dict(json.loads(text))

    def __eq__(self, other):
        if not isinstance(other, CantorApprox):
            return NotImplemented
        return self.depth == other.depth and self.intervals == other.intervals

    def __repr__(self):
        if self.is_self_similar:
            return (f"CantorApprox(gamma={self.gamma}, depth={self.depth}, "
                    f"hull={self.hull}, source={self.source})")
        return f"CantorApprox({len(self.intervals)} intervals, depth={self.depth}, source={self.source})"


def build_self_similar(gamma, depth: int) -> CantorApprox:
    """Depth-``depth`` cover of C_γ: 2**depth intervals of length γ**depth."""
    return CantorApprox.self_similar(gamma, depth)


def gaps(K: CantorApprox) -> list[Gap]:
    return K.gaps()


def restrict(K: CantorApprox, I: Interval) -> CantorApprox:
    """``K ∩ I``, re-hulled, keeping the depth tag."""
    if I.contains_interval(K.hull):
        return K
    if K.is_self_similar:
        try:
            lo_loc = K.locate(I.lo)
            if lo_loc.kind == "set" and I.lo == lo_loc.interval.lo:
                return K.cylinder(I.lo, I.length, "right")
        except PreconditionError:
            pass
    pieces = []
    for iv in K.intervals:
        cut = iv.intersect(I)
        if cut is not None:
            pieces.append(cut)
    if not pieces:
        raise EmptyIntersectionError(f"{I} does not meet the cover")
    return CantorApprox(pieces, depth=K.depth, source="restriction", allow_degenerate=True)


def membership(x, gamma, tol) -> str:
    """Decide ``x ∈ C_γ`` up to ``tol`` by greedy digit extraction.

    Returns "in", "out", or "boundary-undecided" (x lies in a gap but within
    ``tol`` of its endpoints).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    g = _check_gamma(gamma)
    x = as_exact(x)
    if isinstance(x, float):
        x = Fraction(x)
    tol = Fraction(tol) if not isinstance(tol, Fraction) else tol
    lo, L = Fraction(0), Fraction(1)
    if x < 0 or x > 1:
        d = -x if x < 0 else x - 1
        return "boundary-undecided" if d <= tol else "out"
    while L >= tol:
        a, b = lo + g * L, lo + L - g * L
        if x <= a:
            L = g * L
        elif x >= b:
            lo, L = b, g * L
        else:
            return "boundary-undecided" if min(x - a, b - x) <= tol else "out"
    return "in"
