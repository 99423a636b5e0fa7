"""Gap pairs and the gap-pair replacement iteration.

A gap pair (U, V) consists of a gap U of the static set L and a gap V of
the moving set K (typically a transfer-map image) such that each contains
exactly one endpoint of the other.  Two orientations exist:

    "A":  U_l < V_l < U_r < V_r
    "B":  V_l < U_l < V_r < U_r

A step locates an endpoint of one gap in the *other* set.  In orientation A
the point V_r ∈ K is located in L: if it falls in a gap Ũ with |Ũ| < |U|,
then (Ũ, V) is again a gap pair.  Symmetrically U_l ∈ L is located in K to
replace V.  If the located point lands inside the other set's cover at a
resolution finer than ``tol`` the iteration has found an intersection.
Under the thickness hypotheses one of the two replacements always shrinks.

Sets only need ``hull``, ``locate(p, depth)``, ``iter_gaps_by_size`` and a
``depth`` attribute, so both `CantorApprox` and `LazyImage` qualify.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field

from .cantor import CantorApprox
from .errors import (ContainedInGapError, DepthExhausted, DisjointHullsError,
                     PreconditionError, ThicknessProductError)
from .intervals import Interval
from .thickness import thickness

MAX_DEPTH = 90


@dataclass(frozen=True)
class GapPair:
    U: Interval  # gap of L
    V: Interval  # gap of the moving set
    orientation: str

    @property
    def max_len(self):
        return max(self.U.length, self.V.length)

    @property
    def bracket(self) -> Interval:
        return Interval(min(self.U.lo, self.V.lo), max(self.U.hi, self.V.hi))

    def points(self):
        """(point of L, point of K) lying inside the other gap."""
        if self.orientation == "A":
            return self.U.hi, self.V.lo
        return self.U.lo, self.V.hi

    def to_dict(self) -> dict:
        return {"U": [str(self.U.lo), str(self.U.hi)], "V": [str(self.V.lo), str(self.V.hi)],
                "orientation": self.orientation}


@dataclass(frozen=True)
class Hit:
    """A point of one set located in a fine cover cell of the other."""

    point: object
    cell: Interval
    point_in: str  # "L" or "K"


@dataclass
class IntersectionWitness:
    interval: Interval
    trace: list = field(default_factory=list)
    point_L: object = None  # a point of L inside ``interval``
    point_K: object = None  # a point of K inside ``interval``
    depth: int = 0
    steps: int = 0

    def to_dict(self) -> dict:
        return {
            "interval": [str(self.interval.lo), str(self.interval.hi)],
            "point_L": str(self.point_L),
            "point_K": str(self.point_K),
            "depth": self.depth,
            "steps": self.steps,
            "trace": [p.to_dict() for p in self.trace],
        }


class NoAdmissibleReplacement(PreconditionError):
    pass


def classify(U: Interval, V: Interval) -> str | None:
    if U.lo < V.lo < U.hi < V.hi:
        return "A"
    if V.lo < U.lo < V.hi < U.hi:
        return "B"
    return None


def _gaps_by_size(S, max_level):
    for g in S.iter_gaps_by_size(max_level):
        yield g.interval


def find_gap_pair(K_img, L, max_level: int | None = None, limit: int = 20000) -> GapPair | None:
    """Some gap pair between ``L`` and ``K_img``, larger gaps tried first."""
    if not K_img.hull.overlaps(L.hull):
        return None
    lvl_K = min(K_img.depth, 14) if max_level is None else max_level
    lvl_L = min(L.depth, 14) if max_level is None else max_level
    tagged = heapq.merge(
        ((-float(g.length), i, "K", g) for i, g in enumerate(_gaps_by_size(K_img, lvl_K))),
        ((-float(g.length), i, "L", g) for i, g in enumerate(_gaps_by_size(L, lvl_L))),
    )
    for _, _, which, g in itertools.islice(tagged, limit):
        other = L if which == "K" else K_img
        for p in (g.lo, g.hi):
            loc = other.locate(p)
            if loc.kind != "gap":
                continue
            U, V = (loc.interval, g) if which == "K" else (g, loc.interval)
            o = classify(U, V)
            if o:
                return GapPair(U, V, o)
    return None


def _resolve(S, p, depth, tol):
    loc = S.locate(p, depth)
    if loc.kind == "set":
        return ("hit", loc) if loc.width <= tol else ("coarse", loc)
    if loc.kind == "gap":
        return ("gap", loc)
    return ("outside", loc)


def gap_pair_step(pair: GapPair, K_img, L, tol: float, depth: int | None = None):
    """One replacement.  Returns a new `GapPair` or a `Hit`.

    The longer of U, V is replaced first (U on an exact tie); if that branch
    is not admissible the other is tried.
    """
    U, V = pair.U, pair.V
    if pair.orientation == "A":
        pU, pV = V.hi, U.lo
    else:
        pU, pV = V.lo, U.hi
    order = ("U", "V") if U.length >= V.length else ("V", "U")
    coarse = False
    for side in order:
        if side == "U":
            kind, loc = _resolve(L, pU, depth, tol)
            if kind == "hit":
                return Hit(pU, loc.interval, "K")
            if kind == "gap" and loc.interval.length < U.length:
                o = classify(loc.interval, V)
                if o:
                    return GapPair(loc.interval, V, o)
        else:
            kind, loc = _resolve(K_img, pV, depth, tol)
            if kind == "hit":
                return Hit(pV, loc.interval, "L")
            if kind == "gap" and loc.interval.length < V.length:
                o = classify(U, loc.interval)
                if o:
                    return GapPair(U, loc.interval, o)
        coarse = coarse or kind == "coarse"
    if coarse:
        raise DepthExhausted(f"cover too coarse at depth {depth}")
    raise NoAdmissibleReplacement(f"neither gap of {pair} can be replaced by a shorter one")


def _can_deepen(S) -> bool:
    return bool(getattr(S, "is_self_similar", False))


def iterate_gap_pairs(K_img, L, pair: GapPair, tol: float, max_steps: int = 5000,
                      max_depth: int = MAX_DEPTH) -> IntersectionWitness:
    """Replace gaps until the bracket, or a located cell, is narrower than ``tol``."""
    depth = max(K_img.depth, L.depth)
    trace = [pair]
    for step in range(max_steps):
        if pair.bracket.length <= tol:
            pL, pK = pair.points()
            return IntersectionWitness(pair.bracket, trace, pL, pK, depth, step)
        try:
            nxt = gap_pair_step(pair, K_img, L, tol, depth)
        except DepthExhausted:
            if not (_can_deepen(K_img) and _can_deepen(L)) or depth + 2 > max_depth:
                raise
            depth += 2
            continue
        if isinstance(nxt, Hit):
            pL = nxt.point if nxt.point_in == "L" else None
            pK = nxt.point if nxt.point_in == "K" else None
            # the cell belongs to the other set; its endpoints are set points
            if pL is None:
                pL = nxt.cell.lo
            if pK is None:
                pK = nxt.cell.lo
            return IntersectionWitness(nxt.cell, trace, pL, pK, depth, step + 1)
        pair = nxt
        trace.append(pair)
    raise DepthExhausted(f"no witness within {max_steps} steps")


def _direct_common_point(K_img, L, tol, max_depth=MAX_DEPTH, limit=400):
    """Fallback when no gap pair exists (e.g. K = L): look for an endpoint
    of one set lying in arbitrarily fine cells of the other."""
    def candidates(S, lvl):
        yield S.hull.lo
        yield S.hull.hi
        for g in itertools.islice(_gaps_by_size(S, lvl), limit):
            yield g.lo
            yield g.hi

    for S, T, tag in ((K_img, L, "K"), (L, K_img, "L")):
        for p in candidates(S, min(S.depth, 10)):
            depth = T.depth
            while True:
                loc = T.locate(p, depth)
                if loc.kind != "set":
                    break
                if loc.width <= tol:
                    pK, pL = (p, loc.interval.lo) if tag == "K" else (loc.interval.lo, p)
                    return IntersectionWitness(loc.interval, [], pL, pK, depth, 0)
                if not _can_deepen(T) or depth + 2 > max_depth:
                    break
                depth += 2
    return None


def _containment_check(A, B, name_a, name_b):
    lo, hi = B.locate(A.hull.lo), B.locate(A.hull.hi)
    if lo.kind == "gap" and hi.kind == "gap" and lo.interval == hi.interval:
        raise ContainedInGapError(f"{name_a} lies inside the gap {lo.interval} of {name_b}")


def _tau(S):
    base = getattr(S, "base", S)
    return thickness(base).tau


def newhouse_intersect(K, L, slope_bounds=(1.0, 1.0), tol: float = 1e-9,
                       max_steps: int = 5000) -> IntersectionWitness:
    """Witness interval of width <= tol meeting both K and L.

    ``slope_bounds`` = (m, M) bounds the derivative of the map producing K
    from its base set; the thickness of the image is then at least
    τ(base)·m/M.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    m, M = slope_bounds
    prod = float(_tau(K)) * float(_tau(L)) * (m / M)
    if prod <= 1:
        raise ThicknessProductError(f"thickness product {prod:.6g} is not > 1")
    if not K.hull.overlaps(L.hull):
        raise DisjointHullsError(f"hulls {K.hull} and {L.hull} are disjoint")
    _containment_check(K, L, "K", "L")
    _containment_check(L, K, "L", "K")
    pair = find_gap_pair(K, L)
    if pair is None:
        w = _direct_common_point(K, L, tol)
        if w is None:
            raise NoAdmissibleReplacement("no gap pair and no common endpoint found")
        return w
    return iterate_gap_pairs(K, L, pair, tol, max_steps)


def brute_force_intersection(K: CantorApprox, L: CantorApprox) -> list[Interval]:
    """Pairwise intersections of two explicit covers (merge sweep)."""
    a, b = K.intervals, L.intervals
    i = j = 0
    out = []
    while i < len(a) and j < len(b):
        cut = a[i].intersect(b[j])
        if cut is not None:
            out.append(cut)
        if a[i].hi < b[j].hi:
            i += 1
        else:
            j += 1
    return out
