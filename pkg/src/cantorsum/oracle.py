"""Brute-force oracles: rasters of sum sets, pinned distance samples, and
validation of certificates against them.

The oracle checks a necessary condition only.  A true point of a sum set
lies within c·h of the sampled set built from depth-n cell centres (cell
side h), so a certified box whose points miss the samples by more than
that is certainly wrong.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cantor import CantorApprox
from .errors import PreconditionError
from .intervals import IntervalUnion

C_GEOM_SUM = 3.0
C_GEOM_DIST = math.sqrt(2.0)
DEFAULT_CELL = 2.0 ** -10
DEFAULT_WINDOW = (-2.5, 2.5)
MAX_WORK = 5e7  # entries of the per-tile (points x intervals) work arrays


class RasterTooLarge(PreconditionError):
    """Raised when one tile would exceed the memory budget; pass ``tile_rows``."""


# ---------------------------------------------------------------------------
# discretised factors


def cantor_centres(gamma, depth: int, offset: float = 0.0, scale: float = 1.0) -> np.ndarray:
    """Sorted centres of the 2**depth cells of offset + scale·C_γ."""
    g = float(gamma)
    lefts = np.zeros(1)
    length = 1.0
    for _ in range(depth):
        lefts = np.concatenate([lefts, lefts + (1 - g) * length])
        length *= g
    lefts.sort()
    return offset + scale * (lefts + length / 2)


@dataclass
class Discretised:
    lo: np.ndarray
    hi: np.ndarray
    centres: np.ndarray
    h: float  # largest cell side


def discretise(S, depth: int) -> Discretised:
    """Cells of a `CantorApprox` (at ``depth`` when self-similar) or of an
    `IntervalUnion` cut into pieces of length <= 2**-depth."""
    if isinstance(S, CantorApprox):
        if S.is_self_similar:
            g, off, sc = float(S.gamma), float(S.offset), float(S.scale)
            c = cantor_centres(g, depth, off, sc)
            h = sc * g ** depth
            return Discretised(c - h / 2, c + h / 2, c, h)
        lo = np.array([float(iv.lo) for iv in S.intervals])
        hi = np.array([float(iv.hi) for iv in S.intervals])
        return Discretised(lo, hi, (lo + hi) / 2, float(np.max(hi - lo)) if len(lo) else 0.0)
    if isinstance(S, IntervalUnion):
        step = 2.0 ** -depth
        los, his = [], []
        for iv in S.intervals:
            a, b = float(iv.lo), float(iv.hi)
            n = max(1, math.ceil((b - a) / step))
            edges = np.linspace(a, b, n + 1)
            los.append(edges[:-1])
            his.append(edges[1:])
        lo, hi = np.concatenate(los), np.concatenate(his)
        return Discretised(lo, hi, (lo + hi) / 2, float(np.max(hi - lo)))
    raise TypeError(f"cannot discretise {type(S).__name__}")


def components(U: IntervalUnion) -> Discretised:
    """Components of an interval union as cells (no subdivision)."""
    lo = np.array([float(iv.lo) for iv in U.intervals])
    hi = np.array([float(iv.hi) for iv in U.intervals])
    return Discretised(lo, hi, (lo + hi) / 2, float(np.max(hi - lo)))


# ---------------------------------------------------------------------------
# raster grids


@dataclass
class RasterGrid:
    origin: tuple[float, float]
    cell: float
    occupancy: np.ndarray  # bool, shape (ny, nx); row j is y = origin_y + (j + 1/2)·cell
    provenance: dict = field(default_factory=dict)

    @classmethod
    def empty(cls, window=DEFAULT_WINDOW, cell: float = DEFAULT_CELL, ywindow=None,
              provenance=None) -> "RasterGrid":
        ywindow = ywindow or window
        nx = int(round((window[1] - window[0]) / cell))
        ny = int(round((ywindow[1] - ywindow[0]) / cell))
        return cls((window[0], ywindow[0]), cell, np.zeros((ny, nx), dtype=bool),
                   dict(provenance or {}))

    @property
    def shape(self):
        return self.occupancy.shape

    def xs(self) -> np.ndarray:
        return self.origin[0] + (np.arange(self.shape[1]) + 0.5) * self.cell

    def ys(self) -> np.ndarray:
        return self.origin[1] + (np.arange(self.shape[0]) + 0.5) * self.cell

    def index_of(self, p) -> tuple[int, int]:
        i = int(math.floor((p[0] - self.origin[0]) / self.cell))
        j = int(math.floor((p[1] - self.origin[1]) / self.cell))
        return j, i

    def occupied(self, p) -> bool:
        j, i = self.index_of(p)
        if 0 <= j < self.shape[0] and 0 <= i < self.shape[1]:
            return bool(self.occupancy[j, i])
        return False

    @property
    def fraction(self) -> float:
        return float(self.occupancy.mean()) if self.occupancy.size else 0.0

    def __eq__(self, other) -> bool:
        return (isinstance(other, RasterGrid) and self.origin == other.origin
                and self.cell == other.cell and np.array_equal(self.occupancy, other.occupancy))

    def to_pgm(self, path) -> None:
        """Binary PGM (P5); occupied cells black, top row = largest y."""
        img = np.where(self.occupancy[::-1], 0, 255).astype(np.uint8)
        with open(path, "wb") as fh:
            fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii"))
            fh.write(img.tobytes())

    @staticmethod
    def read_pgm(path) -> np.ndarray:
        """Occupancy array (same orientation as `occupancy`) from a P5 file."""
        with open(path, "rb") as fh:
            data = fh.read()
        parts = data.split(maxsplit=4)
        if parts[0] != b"P5":
            raise ValueError("not a binary PGM")
        w, h = int(parts[1]), int(parts[2])
        img = np.frombuffer(parts[4][: w * h], dtype=np.uint8).reshape(h, w)
        return (img == 0)[::-1]


# ---------------------------------------------------------------------------
# sum sets


def _norm(dx, dy, beta):
    if beta == 2.0:
        return np.hypot(dx, dy)
    return (np.abs(dx) ** beta + np.abs(dy) ** beta) ** (1.0 / beta)


def _root(v, beta):
    v = np.maximum(v, 0.0)
    return np.sqrt(v) if beta == 2.0 else v ** (1.0 / beta)


def _meets(lo_b, hi_b, a, b):
    """Elementwise: does the union of sorted disjoint [lo_b, hi_b] meet [a, b]?"""
    idx = np.searchsorted(hi_b, a, side="left")
    ok = idx < len(lo_b)
    first_lo = lo_b[np.minimum(idx, len(lo_b) - 1)]
    return ok & (first_lo <= b) & (a <= b)


def sumset_hits(px, py, A: Discretised, B: Discretised, r: float = 0.0,
                beta: float = 2.0, radius: float = 1.0) -> np.ndarray:
    """For points (px, py): is some cover rectangle R with
    dmin(p, R) - r <= radius <= dmax(p, R) + r?

    With r = 0 this is exact membership in (A x B) + S for connected
    rectangles and the unit sphere S of the β-norm.
    """
    px = np.asarray(px, float)[:, None]
    py = np.asarray(py, float)
    dx_min = np.maximum(0.0, np.maximum(A.lo[None, :] - px, px - A.hi[None, :]))
    dx_max = np.maximum(np.abs(px - A.lo[None, :]), np.abs(px - A.hi[None, :]))
    r1 = _root((radius + r) ** beta - dx_min ** beta, beta)
    inner = np.maximum(radius - r, 0.0) ** beta - dx_max ** beta
    r2 = np.where(inner > 0, _root(inner, beta), 0.0)
    feasible = dx_min <= radius + r
    y = py[:, None]
    hit = _meets(B.lo, B.hi, y - r1, y - r2) | _meets(B.lo, B.hi, y + r2, y + r1)
    return np.any(hit & feasible, axis=1)


def _tile_rows(n_rows, n_cols, n_int, tile_rows):
    if tile_rows is None:
        if n_rows * n_cols * n_int > MAX_WORK:
            raise RasterTooLarge(
                f"{n_rows}x{n_cols} cells against {n_int} intervals exceeds the memory "
                f"budget; pass tile_rows (e.g. {max(1, int(MAX_WORK // (n_cols * n_int)))})")
        return n_rows
    return max(1, int(tile_rows))


def sample_sumset(K1, K2, depth: int, curve: str = "circle", beta: float = 2.0,
                  window=DEFAULT_WINDOW, cell: float = DEFAULT_CELL, ywindow=None,
                  tile_rows: int | None = None) -> RasterGrid:
    """Cells of the grid met by (R + curve) for some cover rectangle R.

    Covers shrink with depth, so occupancy is non-increasing in depth.
    """
    if curve not in ("circle", "pnorm-circle"):
        raise PreconditionError(f"unknown curve {curve!r}")
    b = 2.0 if curve == "circle" else float(beta)
    A, B = discretise(K1, depth), discretise(K2, depth)
    grid = RasterGrid.empty(window, cell, ywindow,
                            {"kind": "sum-set", "depth": depth, "curve": curve, "beta": b})
    xs, ys = grid.xs(), grid.ys()
    # half diagonal in the β-norm bounds the cell's reach
    r = cell / 2 * 2 ** (1 / b)
    rows = _tile_rows(len(ys), len(xs), len(A.lo), tile_rows)
    for j0 in range(0, len(ys), rows):
        yy = ys[j0:j0 + rows]
        PX, PY = np.meshgrid(xs, yy)
        hit = sumset_hits(PX.ravel(), PY.ravel(), A, B, r, b)
        grid.occupancy[j0:j0 + rows] = hit.reshape(PX.shape)
    return grid


def sumset_miss(px, py, A: Discretised, B: Discretised) -> np.ndarray:
    """Distance from each point to the union of unit circles centred at the
    cell-centre pairs (a, b)."""
    px = np.asarray(px, float)
    py = np.asarray(py, float)
    a = A.centres[None, :]
    bc = B.centres
    out = np.empty(len(px))
    for k in range(len(px)):
        dx = px[k] - a[0]
        best = np.full(len(dx), np.inf)
        rad = 1.0 - dx * dx
        root = np.sqrt(np.maximum(rad, 0.0))
        for target in (py[k] + root, py[k] - root):
            idx = np.searchsorted(bc, target)
            for cand in (idx - 1, idx):
                cand = np.clip(cand, 0, len(bc) - 1)
                d = np.abs(np.hypot(dx, py[k] - bc[cand]) - 1.0)
                best = np.minimum(best, d)
        out[k] = float(best.min())
    return out


# ---------------------------------------------------------------------------
# pinned distances


def sample_pinned(C, t, beta: float, depth: int, resolution: float = 1e-12,
                  max_pairs: float = 5e7) -> np.ndarray:
    """Sorted, deduplicated ‖(a, b) - t‖_β over cell-centre pairs."""
    if beta < 1:
        raise PreconditionError("beta must be >= 1")
    D = discretise(C, depth)
    c = D.centres
    if len(c) ** 2 > max_pairs:
        raise RasterTooLarge(f"{len(c) ** 2} pairs; use pinned_miss for deep validation")
    out = []
    for a in np.array_split(c, max(1, len(c) // 256)):
        d = _norm(a[:, None] - float(t[0]), c[None, :] - float(t[1]), beta).ravel()
        out.append(np.unique(np.round(d / resolution)))
    return np.unique(np.concatenate(out)) * resolution


def pinned_miss(values, C, t, beta: float, depth: int, C2=None) -> np.ndarray:
    """min over cell-centre pairs (a, b) ∈ C x C2 of |‖(a, b) - t‖_β - v|."""
    ca = discretise(C, depth).centres
    c = ca if C2 is None else discretise(C2, depth).centres
    t1, t2 = float(t[0]), float(t[1])
    dxb = np.abs(ca - t1) ** beta
    out = np.empty(len(values))
    for k, v in enumerate(values):
        best = np.full(len(ca), np.inf)
        root = _root(v ** beta - dxb, beta)
        for target in (t2 + root, t2 - root, np.full(len(ca), t2)):
            idx = np.searchsorted(c, target)
            for cand in (idx - 1, idx):
                cand = np.clip(cand, 0, len(c) - 1)
                d = np.abs(_norm(ca - t1, c[cand] - t2, beta) - v)
                best = np.minimum(best, d)
        out[k] = float(best.min())
    return out


def largest_gap_in(samples: np.ndarray, lo: float, hi: float) -> float:
    """Largest gap of the sample set inside [lo, hi] (ends count as gaps)."""
    s = samples[(samples >= lo) & (samples <= hi)]
    pts = np.concatenate([[lo], s, [hi]])
    return float(np.max(np.diff(pts)))


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    certificate_id: str
    depth: int
    rho: float
    fraction: float
    max_miss: float
    verdict: str  # "pass" or "fail"
    n_points: int = 0
    degenerate: bool = False
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return {"certificate_id": self.certificate_id, "depth": self.depth, "rho": self.rho,
                "fraction": self.fraction, "max_miss": self.max_miss, "verdict": self.verdict,
                "n_points": self.n_points, "degenerate": self.degenerate,
                "details": self.details}


def certificate_id(cert) -> str:
    return hashlib.sha256(cert.to_json(indent=None).encode()).hexdigest()[:16]


def box_points(lo: float, hi: float, cell: float = DEFAULT_CELL, min_n: int = 16) -> np.ndarray:
    """Pixel centres of the grid inside [lo, hi], or a uniform grid
    (endpoints included) when the interval spans fewer than ``min_n`` pixels."""
    first = math.ceil(lo / cell - 0.5)
    last = math.floor(hi / cell - 0.5)
    if last - first + 1 >= min_n:
        return (np.arange(first, last + 1) + 0.5) * cell
    return np.linspace(lo, hi, min_n)


def value_points(lo: float, hi: float, step: float = 1e-3) -> np.ndarray:
    """10⁻³-grid of an interval, refined to at least 64 steps."""
    h = min(step, (hi - lo) / 64) if hi > lo else step
    n = max(2, int(math.floor((hi - lo) / h)) + 1)
    return np.linspace(lo, hi, n)


def _factor_sets(cert):
    """Rebuild factor sets recorded in a certificate."""
    ex = cert.extra
    if cert.claim in ("sum-circle-middle-third", "pinned-middle-third"):
        C = CantorApprox.self_similar(Fraction(1, 3), cert.depth or 16)
        return C, C
    if "K1" in ex:
        g1, g2 = Fraction(ex["K1"]["gamma"]), Fraction(ex["K2"]["gamma"])
        return CantorApprox.self_similar(g1, cert.depth), CantorApprox.self_similar(g2, cert.depth)
    if "gamma" in ex:
        C = CantorApprox.self_similar(Fraction(ex["gamma"]), cert.depth)
        return C, C
    if "A" in ex:
        return (IntervalUnion([[Fraction(a), Fraction(b)] for a, b in ex["A"]]),
                IntervalUnion([[Fraction(a), Fraction(b)] for a, b in ex["B"]]))
    raise PreconditionError("certificate does not record its factor sets")


def validate(cert, depth: int | None = None, betas=None, cell: float = DEFAULT_CELL) -> ValidationReport:
    """Necessary-condition check of a certificate against brute-force samples."""
    cid = certificate_id(cert)
    depth = depth if depth is not None else (cert.depth or 12)
    J = cert.value_interval
    if J is None or J[0] > J[1]:
        return ValidationReport(cid, depth, 0.0, 1.0, 0.0, "pass", 0, True,
                                {"note": "empty value interval: vacuous"})
    if cert.claim == "annulus":
        return _validate_annulus(cert, cid, cell)
    fam = cert.family.get("family")
    K1, K2 = _factor_sets(cert)
    if fam == "pnorm":
        t = cert.family["t"]
        betas = betas or sorted({cert.alpha_interval[0], 0.5 * sum(cert.alpha_interval),
                                 cert.alpha_interval[1]})
        vs = value_points(*J)
        D = discretise(K1, depth)
        rho = C_GEOM_DIST * D.h + 1e-12
        miss = {}
        for b in betas:
            miss[b] = pinned_miss(vs, K1, t, b, depth, K2)
        worst = max(float(m.max()) for m in miss.values())
        frac = float(np.mean(np.concatenate([m <= rho for m in miss.values()])))
        details = {"betas": list(betas), "per_beta_max_miss": {str(b): float(m.max())
                                                               for b, m in miss.items()}}
        verdict = "pass" if frac == 1.0 else "fail"
        return ValidationReport(cid, depth, rho, frac, worst, verdict, len(vs) * len(betas),
                                False, details)
    if fam in ("circle-sum",) or (fam == "generalized-product" and
                                  cert.family.get("coeffs") == [0.0, 0.0, 1.0, 0.0]):
        I = cert.alpha_interval
        xs, ys = box_points(I[0], I[1], cell), box_points(J[0], J[1], cell)
        PX, PY = np.meshgrid(xs, ys)
        A, B = discretise(K1, depth), discretise(K2, depth)
        rho = C_GEOM_SUM * max(A.h, B.h)
        m = sumset_miss(PX.ravel(), PY.ravel(), A, B)
        frac = float(np.mean(m <= rho))
        return ValidationReport(cid, depth, rho, frac, float(m.max()),
                                "pass" if frac == 1.0 else "fail", len(m), False, {})
    if fam == "custom" and cert.family.get("name") == "flat-sum":
        S = K1.minkowski_sum(K2)
        vs = value_points(*J)
        inside = np.array([S.contains(Fraction(float(v))) for v in vs])
        frac = float(inside.mean())
        return ValidationReport(cid, depth, 0.0, frac, 0.0 if frac == 1 else math.inf,
                                "pass" if frac == 1.0 else "fail", len(vs), False,
                                {"method": "exact interval-union sum"})
    raise PreconditionError(f"no oracle for family {fam!r}")


def _validate_annulus(cert, cid, cell):
    A, B = _factor_sets(cert)
    DA, DB = components(A), components(B)
    w = cert.constants["radial_halfwidth"]
    n = int(math.ceil((1 + w) / cell)) + 1
    axis = (np.arange(-n, n) + 0.5) * cell
    PX, PY = np.meshgrid(axis, axis)
    r = np.hypot(PX, PY)
    band = (r > 1 - w) & (r < 1 + w)
    px, py = PX[band], PY[band]
    hit = sumset_hits(px, py, DA, DB, 0.0)
    # column bands around the poles: c = ±γ(α) ± e(α) at the recorded α
    pole_fail = 0
    pole_n = 0
    alphas = np.asarray(cert.extra["alphas"])
    for name, ws in cert.extra["widths"].items():
        ws = np.asarray(ws)
        sign = 1 if name in ("N", "E") else -1
        for frac in (-0.95, -0.5, 0.0, 0.5, 0.95):
            c = sign * np.sqrt(1 - alphas ** 2) + frac * ws
            qx, qy = (alphas, c) if name in ("N", "S") else (c, alphas)
            ok = sumset_hits(qx, qy, DA, DB, 0.0)
            pole_fail += int((~ok).sum())
            pole_n += len(ok)
    frac_band = float(hit.mean()) if len(hit) else 1.0
    fraction = frac_band if pole_fail == 0 else frac_band * (1 - pole_fail / pole_n)
    verdict = "pass" if fraction == 1.0 else "fail"
    return ValidationReport(cid, 0, 0.0, fraction, 0.0 if verdict == "pass" else math.inf,
                            verdict, int(len(hit) + pole_n), False,
                            {"cell": cell, "band_pixels": int(len(hit)),
                             "pole_samples": pole_n, "pole_failures": pole_fail})


def shifted(cert, dc: float = 0.1):
    """Copy of ``cert`` with the value interval shifted (negative control)."""
    from dataclasses import replace
    J = cert.value_interval
    return replace(cert, value_interval=[J[0] + dc, J[1] + dc])


# ---------------------------------------------------------------------------
# offset regions


def _polyline_distances(px, py, pts: np.ndarray):
    """(min, max) distance from points to a polyline with vertices ``pts``."""
    P = np.stack([px, py], axis=1)
    dmax = np.max(np.hypot(P[:, None, 0] - pts[None, :, 0], P[:, None, 1] - pts[None, :, 1]), axis=1)
    if len(pts) == 1:
        dmin = np.hypot(px - pts[0, 0], py - pts[0, 1])
        return dmin, dmax
    dmin = np.full(len(px), np.inf)
    for a, b in zip(pts[:-1], pts[1:]):
        ab = b - a
        L2 = float(ab @ ab)
        s = np.clip(((P - a) @ ab) / L2, 0, 1) if L2 > 0 else np.zeros(len(px))
        proj = a[None, :] + s[:, None] * ab[None, :]
        dmin = np.minimum(dmin, np.hypot(*(P - proj).T))
    return dmin, dmax


def offset_region(polyline, window=(-2.0, 2.0), cell: float = 2.0 ** -6) -> tuple[RasterGrid, RasterGrid]:
    """(Â, A + S¹) rasters for a polyline A, where Â is the set of points with
    one point of A closer than 1 and another farther than 1.

    Raises AssertionError if a cell of Â is missing from A + S¹.
    """
    pts = np.asarray(polyline, float).reshape(-1, 2)
    hat = RasterGrid.empty(window, cell, provenance={"kind": "offset-region"})
    plus = RasterGrid.empty(window, cell, provenance={"kind": "sum-set", "curve": "circle"})
    PX, PY = np.meshgrid(hat.xs(), hat.ys())
    dmin, dmax = _polyline_distances(PX.ravel(), PY.ravel(), pts)
    hat.occupancy[:] = ((dmin < 1) & (dmax > 1)).reshape(PX.shape)
    plus.occupancy[:] = ((dmin <= 1) & (dmax >= 1)).reshape(PX.shape)
    if np.any(hat.occupancy & ~plus.occupancy):
        raise AssertionError("offset region not contained in A + S^1")
    return hat, plus
