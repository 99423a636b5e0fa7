"""Newhouse thickness, ε-bridges and ε-thickness of finite-depth covers.

For a right endpoint ``u = r(G)`` the ε-bridge runs from ``u`` to the left
end of the first gap G̃ to the right with ``|G̃| >= (1-ε)|G|`` (or to the
hull endpoint when no such gap exists); left endpoints are mirrored.  All
comparisons are exact when the cover has rational endpoints, so ties
terminate the bridge as they should.
"""

from __future__ import annotations

import bisect
import functools
import math
from dataclasses import dataclass
from fractions import Fraction

from .cantor import CantorApprox
from .errors import NoBoundedGapsError, NotAGapEndpointError, PreconditionError
from .intervals import Interval, Real

# deeper gaps of an affine copy of C_γ are scaled copies of the shallow ones,
# so the sweep never needs more structure than this
SELF_SIMILAR_SWEEP_DEPTH = 12


@dataclass(frozen=True)
class BridgeResult:
    u: Real
    side: str  # "right-of-gap" (u = r(G)) or "left-of-gap" (u = l(G))
    gap: Interval
    bridge: Interval
    epsilon: Real
    terminating_gap: Interval | None  # None: the unbounded component

    @property
    def local_thickness(self) -> Real:
        return self.bridge.length / self.gap.length


@dataclass(frozen=True)
class ThicknessReport:
    tau: Real
    attaining_endpoint: Real
    side: str
    depth: int
    epsilon: Real

    def to_dict(self) -> dict:
        return {
            "tau": float(self.tau),
            "tau_exact": str(self.tau),
            "attaining_endpoint": str(self.attaining_endpoint),
            "side": self.side,
            "depth": self.depth,
            "epsilon": float(self.epsilon),
        }


def _as_eps(eps) -> Real:
    if isinstance(eps, str):
        eps = Fraction(eps)
    if not 0 <= eps < 1:
        raise PreconditionError(f"epsilon must lie in [0, 1), got {eps}")
    if isinstance(eps, float):
        return Fraction(eps)
    return Fraction(eps)


class _MaxTable:
    """Sparse table answering 'first index >= i whose rank >= r'."""

    def __init__(self, ranks: list[int]):
        self.n = len(ranks)
        self.table = [ranks]
        k = 1
        while (1 << k) <= self.n:
            prev = self.table[-1]
            half = 1 << (k - 1)
            self.table.append([max(prev[i], prev[i + half]) for i in range(self.n - (1 << k) + 1)])
            k += 1

    def first_at_least(self, start: int, r: int) -> int:
        pos = start
        for k in range(len(self.table) - 1, -1, -1):
            row = self.table[k]
            if pos < len(row) and row[pos] < r:
                pos += 1 << k
        # after greedy skips, pos is the first index with rank >= r (or n)
        while pos < self.n and self.table[0][pos] < r:
            pos += 1
        return pos


class GapStructure:
    """Precomputed gap data of one cover, reusable across ε values."""

    def __init__(self, K: CantorApprox):
        if K.is_self_similar and K.depth > SELF_SIMILAR_SWEEP_DEPTH:
            K = K.with_depth(SELF_SIMILAR_SWEEP_DEPTH)
        self.K = K
        self.gaps = K.bounded_gaps()
        if not self.gaps:
            raise NoBoundedGapsError("the cover has no bounded gaps; thickness is undefined")
        self.lengths = [g.length for g in self.gaps]
        self.levels = sorted(set(self.lengths))
        ranks = [bisect.bisect_left(self.levels, L) for L in self.lengths]
        self.right = _MaxTable(ranks)
        self.left = _MaxTable(ranks[::-1])
        self._by_right = {g.hi: i for i, g in enumerate(self.gaps)}
        self._by_left = {g.lo: i for i, g in enumerate(self.gaps)}

    def _rank_threshold(self, value) -> int:
        return bisect.bisect_left(self.levels, value)

    def bridge_at(self, i: int, side: str, eps) -> BridgeResult:
        G = self.gaps[i]
        r = self._rank_threshold((1 - eps) * G.length)
        n = len(self.gaps)
        hull = self.K.hull
        if side == "right-of-gap":
            j = self.right.first_at_least(i + 1, r)
            if j < n:
                term = self.gaps[j]
                return BridgeResult(G.hi, side, G, Interval(G.hi, term.lo), eps, term)
            return BridgeResult(G.hi, side, G, Interval(G.hi, hull.hi), eps, None)
        j = self.left.first_at_least(n - i, r)
        if j < n:
            term = self.gaps[n - 1 - j]
            return BridgeResult(G.lo, side, G, Interval(term.hi, G.lo), eps, term)
        return BridgeResult(G.lo, side, G, Interval(hull.lo, G.lo), eps, None)

    def index_of(self, u, side: str | None = None) -> tuple[int, str]:
        if side in (None, "right-of-gap") and u in self._by_right:
            return self._by_right[u], "right-of-gap"
        if side in (None, "left-of-gap") and u in self._by_left:
            return self._by_left[u], "left-of-gap"
        raise NotAGapEndpointError(f"{u} is not an endpoint of a bounded gap")

    def sweep(self, eps):
        """Yield every bridge at the given ε."""
        for i in range(len(self.gaps)):
            yield self.bridge_at(i, "left-of-gap", eps)
            yield self.bridge_at(i, "right-of-gap", eps)

    def thickness(self, eps=0) -> ThicknessReport:
        eps = _as_eps(eps)
        best = None
        for b in self.sweep(eps):
            t = b.local_thickness
            if best is None or t < best[0]:
                best = (t, b)
        t, b = best
        return ThicknessReport(t, b.u, b.side, self.K.depth, eps)


def bridge(K: CantorApprox, u, eps=0, side: str | None = None) -> BridgeResult:
    """ε-bridge at the gap endpoint ``u``."""
    gs = GapStructure(K)
    i, side = gs.index_of(u, side)
    return gs.bridge_at(i, side, _as_eps(eps))


def local_thickness(K: CantorApprox, u, eps=0, side: str | None = None) -> Real:
    return bridge(K, u, eps, side).local_thickness


@functools.lru_cache(maxsize=256)
def _canonical_thickness(gamma, depth: int, eps) -> ThicknessReport:
    return GapStructure(CantorApprox.self_similar(gamma, depth)).thickness(eps)


def thickness(K: CantorApprox, eps=0) -> ThicknessReport:
    """τ_ε(K): minimum local thickness over all bounded-gap endpoints."""
    eps = _as_eps(eps)
    if K.is_self_similar:
        # affine copies share the thickness of the standard set
        rep = _canonical_thickness(K.gamma, min(K.depth, SELF_SIMILAR_SWEEP_DEPTH), eps)
        u = K.offset + K.scale * rep.attaining_endpoint
        return ThicknessReport(rep.tau, u, rep.side, K.depth, eps)
    return GapStructure(K).thickness(eps)


def self_similar_thickness(gamma) -> Fraction:
    """Closed form γ/(1-2γ) for the symmetric Cantor set."""
    g = Fraction(gamma) if not isinstance(gamma, float) else gamma
    return g / (1 - 2 * g)


def epsilon_for_product(tau_1: Real, tau_2: Real, margin: float = 0.5) -> float:
    """Largest-ish ε with τ₂·(1-ε)²·τ₁ > 1, keeping a fraction ``margin`` of
    the available slack.  Relies on the lower bound τ_ε >= (1-ε)²τ."""
    prod = float(tau_1) * float(tau_2)
    if prod <= 1:
        raise PreconditionError(f"thickness product {prod} is not > 1")
    # (1-ε)² = 1/prod is the break-even point
    eps_max = 1 - 1 / math.sqrt(prod)
    return eps_max * margin
