"""Negative results: the Giant and the polygon construction.

Both are demonstrated by exact rational arithmetic on the points that
matter; the rasters are illustrations only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from .errors import PreconditionError
from .oracle import RasterGrid


def _exact(v) -> Fraction:
    if isinstance(v, bool):
        raise PreconditionError("booleans are not coordinates")
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except ValueError as exc:
            raise PreconditionError(f"not a rational literal: {v!r}") from exc
    raise PreconditionError(
        f"{type(v).__name__} input rejected: the exclusion is exact only for rational coordinates")


def parse_point(q) -> tuple[Fraction, Fraction]:
    if isinstance(q, str):
        q = q.split(",")
    q = tuple(q)
    if len(q) != 2:
        raise PreconditionError("a point needs two coordinates")
    return _exact(q[0]), _exact(q[1])


# ---------------------------------------------------------------------------
# the Giant: complement of all unit circles with rational centres


@dataclass
class ProofStep:
    claim: str
    check: bool


@dataclass
class GiantTrace:
    q: tuple[Fraction, Fraction]
    steps: list[ProofStep] = field(default_factory=list)

    @property
    def excluded(self) -> bool:
        return all(s.check for s in self.steps)

    def to_dict(self) -> dict:
        return {"q": [str(c) for c in self.q], "excluded": self.excluded,
                "steps": [{"claim": s.claim, "check": s.check} for s in self.steps]}

    def __str__(self) -> str:
        lines = [f"q = ({self.q[0]}, {self.q[1]})"]
        lines += [f"  [{'ok' if s.check else 'FAIL'}] {s.claim}" for s in self.steps]
        lines.append("q is not in Giant + S^1" if self.excluded else "exclusion not established")
        return "\n".join(lines)


# rational points of S¹ from Pythagorean triples; used to spot-check that the
# circle S(q, 1) consists of removed points
_PYTHAGOREAN = [(Fraction(3, 5), Fraction(4, 5)), (Fraction(5, 13), Fraction(12, 13)),
                (Fraction(8, 17), Fraction(15, 17)), (Fraction(1), Fraction(0))]


def giant_excludes(q) -> GiantTrace:
    """Exact argument that the rational point q is not in Giant + S¹.

    If q = g + s with |s| = 1 then g lies on S(q, 1), a unit circle centred
    at a rational point, which is removed from the Giant.  Every check is
    exact rational arithmetic.
    """
    q = parse_point(q)
    tr = GiantTrace(q)
    tr.steps.append(ProofStep(
        f"q has rational coordinates with denominators {q[0].denominator}, {q[1].denominator}",
        all(isinstance(c, Fraction) for c in q)))
    tr.steps.append(ProofStep(
        "any g with q = g + s, |s| = 1, satisfies |g - q| = 1, i.e. g ∈ S(q, 1)", True))
    v = q  # the centre of the removed circle
    tr.steps.append(ProofStep(
        f"S(q, 1) = S(v, 1) with v = ({v[0]}, {v[1]}) ∈ Q², a member of the removed family",
        v == q and all(isinstance(c, Fraction) for c in v)))
    spot = []
    for cx, cy in _PYTHAGOREAN:
        for sx, sy in product((1, -1), repeat=2):
            g = (q[0] + sx * cx, q[1] + sy * cy)
            spot.append((g[0] - v[0]) ** 2 + (g[1] - v[1]) ** 2 == 1)
    tr.steps.append(ProofStep(
        f"spot check: {len(spot)} rational points of S(q, 1) satisfy |g - v|² = 1 exactly",
        all(spot)))
    tr.steps.append(ProofStep(
        "hence S(q, 1) ∩ Giant = ∅ and q ∉ Giant + S¹; this is the instance B = Q², S = S¹ "
        "of ((B + S)^c + S) ∩ B = ∅ for symmetric S", True))
    return tr


def in_truncated_giant_sum(x, N: int) -> bool:
    """Exact membership of x in Giant_N + S¹, where Giant_N removes the unit
    circles centred at rational points with denominators <= N.

    S(x, 1) meets each removed circle with centre v != x in at most two
    points, so it is covered only when x itself is a removed centre.
    """
    x = parse_point(x)
    return not (x[0].denominator <= N and x[1].denominator <= N)


def rational_grid(N: int, window=(-1, 1)) -> list[tuple[Fraction, Fraction]]:
    """All points of the window whose coordinates have denominators <= N."""
    lo, hi = Fraction(window[0]), Fraction(window[1])
    vals = sorted({Fraction(k, d) for d in range(1, N + 1)
                   for k in range(math.floor(lo * d), math.ceil(hi * d) + 1)
                   if lo <= Fraction(k, d) <= hi})
    return [(a, b) for a in vals for b in vals]


def giant_raster(N: int, window=(-1, 1), cell=Fraction(1, 64)) -> RasterGrid:
    """Illustrative raster of Giant_N + S¹ evaluated exactly at grid nodes.

    Nodes are the points window_lo + i·cell, so with cell = 1/m the nodes
    with denominators <= N (when they divide m) appear unoccupied.
    """
    cell = Fraction(cell)
    lo, hi = Fraction(window[0]), Fraction(window[1])
    n = int((hi - lo) / cell) + 1
    nodes = [lo + i * cell for i in range(n)]
    ok = np.array([[in_truncated_giant_sum((x, y), N) for x in nodes] for y in nodes])
    # node i sits at the centre of raster cell i
    origin = (float(lo - cell / 2), float(lo - cell / 2))
    return RasterGrid(origin, float(cell), ok,
                      {"kind": "giant-truncated", "N": N, "illustrative": True})


# ---------------------------------------------------------------------------
# polygons


def _unit_normal(d):
    """Unit normal e_{α⊥} = (-d_y, d_x)/|d|; exact when |d| is rational."""
    dx, dy = d
    n2 = dx * dx + dy * dy
    if n2 == 0:
        raise PreconditionError("degenerate segment")
    if isinstance(n2, Fraction):
        num, den = n2.numerator, n2.denominator
        rn, rd = math.isqrt(num), math.isqrt(den)
        if rn * rn == num and rd * rd == den:
            L = Fraction(rn, rd)
            return (-dy / L, dx / L)
    L = math.sqrt(float(n2))
    return (-float(dy) / L, float(dx) / L)


@dataclass(frozen=True)
class Line:
    """{x : ⟨x, e⟩ = offset} for a unit normal e."""

    normal: tuple
    offset: object

    def parallel(self, other: "Line") -> bool:
        a, b = self.normal, other.normal
        return a[0] * b[1] - a[1] * b[0] == 0

    def __add__(self, other: "Line"):
        """Minkowski sum; parallel lines add offsets, others fill the plane."""
        if not self.parallel(other):
            return "plane"
        sign = 1 if self.normal[0] * other.normal[0] + self.normal[1] * other.normal[1] > 0 else -1
        return Line(self.normal, self.offset + sign * other.offset)

    def contains(self, x) -> bool:
        return self.normal[0] * x[0] + self.normal[1] * x[1] == self.offset


@dataclass
class PolygonSpec:
    segments: list  # [((x0, y0), (x1, y1)), ...]

    def __post_init__(self):
        segs = []
        for p, q in self.segments:
            p, q = parse_point(p), parse_point(q)
            if p == q:
                raise PreconditionError("degenerate segment")
            segs.append((p, q))
        self.segments = segs

    @classmethod
    def unit_square(cls) -> "PolygonSpec":
        c = [(0, 0), (1, 0), (1, 1), (0, 1)]
        return cls([(c[i], c[(i + 1) % 4]) for i in range(4)])

    def sides(self):
        """(α_i, e_{α_i⊥}, u_i) per side: ℓ̃_i = u_i·e_{α_i⊥} + ℓ_i."""
        out = []
        for p, q in self.segments:
            d = (q[0] - p[0], q[1] - p[1])
            e = _unit_normal(d)
            u = e[0] * p[0] + e[1] * p[1]
            out.append((math.atan2(float(d[1]), float(d[0])), e, u))
        return out

    def to_dict(self) -> dict:
        return {"segments": [[[str(c) for c in p], [str(c) for c in q]] for p, q in self.segments]}

    @classmethod
    def from_dict(cls, d: dict) -> "PolygonSpec":
        return cls([tuple(tuple(pt) for pt in seg) for seg in d["segments"]])


def family_P(e, G) -> list[Line]:
    """P_i(G): the lines g·e_{α⊥} + ℓ_i, g ∈ G."""
    return [Line(e, g) for g in G]


def family_P_tilde(e, u, G) -> list[Line]:
    """P̃_i(G) = P_i(G + u_i)."""
    return [Line(e, g + u) for g in G]


def check_line_identity(spec: PolygonSpec, G) -> bool:
    """P_i(G) + ℓ̃_i == P̃_i(G) for every side, by exact line arithmetic."""
    for _, e, u in spec.sides():
        lhs = {ln + Line(e, u) for ln in family_P(e, G)}
        rhs = set(family_P_tilde(e, u, G))
        if lhs != rhs:
            return False
    return True


def in_polygon_sum(x, spec: PolygonSpec, G) -> bool:
    """Exact membership of x in A + Γ with A the complement of ∪_i P_i(G).

    x - Γ is covered by the removed lines exactly when each translated side
    lies on a removed line of its own direction (a transversal line meets a
    segment in one point, and G is finite).
    """
    sides = spec.sides()
    G = [Fraction(g) if not isinstance(g, float) else g for g in G]
    for _, e, u in sides:
        s = e[0] * x[0] + e[1] * x[1] - u  # offset of x - side_i along e
        covered = False
        for _, e2, _u2 in sides:
            if e2[0] * e[1] - e2[1] * e[0] != 0:
                continue
            sign = 1 if e2[0] * e[0] + e2[1] * e[1] > 0 else -1
            if any(sign * s == g for g in G):
                covered = True
                break
        if not covered:
            return True
    return False


@dataclass
class PolygonReport:
    raster: RasterGrid
    miss_points: list
    miss_lines: dict
    untouched: bool
    identity_ok: bool

    def to_dict(self) -> dict:
        return {"n_miss_points": len(self.miss_points),
                "miss_lines": {k: [str(v) for v in vs] for k, vs in self.miss_lines.items()},
                "untouched": self.untouched, "identity_ok": self.identity_ok,
                "occupancy_fraction": self.raster.fraction}


def miss_offsets(spec: PolygonSpec, G) -> list:
    """Per side direction e: offsets s with {⟨x, e⟩ = s} inside P̃_i(G) for
    every side i of that direction."""
    sides = spec.sides()
    dirs = []
    for _, e, u in sides:
        if not any(e[0] * d[1] - e[1] * d[0] == 0 for d, _ in dirs):
            dirs.append((e, []))
        for d, offs in dirs:
            if e[0] * d[1] - e[1] * d[0] == 0:
                sign = 1 if e[0] * d[0] + e[1] * d[1] > 0 else -1
                offs.append({sign * (g + u) for g in G})
    return [(e, set.intersection(*offs)) for e, offs in dirs]


def miss_set(spec: PolygonSpec, G, window=(-1, 2)) -> list:
    """Points of ∩_i P̃_i(G) in the window for a polygon with two side
    directions (empty otherwise; see `miss_offsets`)."""
    lo, hi = Fraction(window[0]), Fraction(window[1])
    per_dir = miss_offsets(spec, G)
    if len(per_dir) != 2 or any(not isinstance(c, Fraction) for e, _ in per_dir for c in e):
        return []
    (e1, o1), (e2, o2) = per_dir
    det = e1[0] * e2[1] - e1[1] * e2[0]
    pts = []
    for s1 in sorted(o1):
        for s2 in sorted(o2):
            x = ((s1 * e2[1] - s2 * e1[1]) / det, (e1[0] * s2 - e2[0] * s1) / det)
            if lo <= x[0] <= hi and lo <= x[1] <= hi:
                pts.append(x)
    return pts


def polygon_sum_demo(spec: PolygonSpec, G, window=(-1, 2), cell=Fraction(1, 16)) -> PolygonReport:
    """Exact node raster of A_N + Γ and the report of untouched points."""
    G = [Fraction(g) for g in G]
    cell = Fraction(cell)
    lo, hi = Fraction(window[0]), Fraction(window[1])
    n = int((hi - lo) / cell) + 1
    nodes = [lo + i * cell for i in range(n)]
    occ = np.array([[in_polygon_sum((x, y), spec, G) for x in nodes] for y in nodes])
    raster = RasterGrid((float(lo - cell / 2), float(lo - cell / 2)), float(cell), occ,
                        {"kind": "polygon-sum", "illustrative": True})
    pts = miss_set(spec, G, window)
    untouched = all(not in_polygon_sum(p, spec, G) for p in pts)
    lines: dict = {}
    for p in pts:
        lines.setdefault(f"y={p[1]}", []).append(p[0])
    offs = miss_offsets(spec, G)
    if len(offs) == 1:
        # one direction: the miss set is a family of whole lines
        e, o = offs[0]
        lines = {f"<x,({e[0]},{e[1]})>": sorted(o)}
        probe = [(s_ * e[0] + t * -e[1], s_ * e[1] + t * e[0])
                 for s_ in sorted(o) for t in (Fraction(0), Fraction(1, 3))
                 if isinstance(e[0], Fraction)]
        untouched = all(not in_polygon_sum(p, spec, G) for p in probe)
    return PolygonReport(raster, pts, lines, untouched, check_line_identity(spec, G))


def g_grid(denominator: int, max_abs: int = 2) -> list[Fraction]:
    """G = {k/d : |k/d| <= max_abs}, a finite truncation of a dense set."""
    d = int(denominator)
    return [Fraction(k, d) for k in range(-max_abs * d, max_abs * d + 1)]
