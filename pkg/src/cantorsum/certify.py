"""Certificates that sum sets and pinned distance sets contain boxes.

Every certifier follows the same shape: pick anchors, certify a solver box
by interval arithmetic, derive the constants of the relevant argument,
produce a parameter box I x J, and record concrete witness pairs (a, b)
with |H(α, a, b) - c| small at a grid of (c, α) inside the box.  The
witnesses are evidence; the recorded constants carry the argument.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction

import numpy as np

from .cantor import CantorApprox, build_self_similar, membership
from .errors import (BoxRejected, CertificationFailed, DepthExhausted, LeftSolverBox,
                     PreconditionError, ThicknessProductError)
from .gaplemma import (NoAdmissibleReplacement, find_gap_pair, iterate_gap_pairs,
                       newhouse_intersect)
from .intervals import Enclosure, Interval, IntervalUnion
from .thickness import thickness
from .transfer import (CircleSum, LazyImage, PNormDistance, SolverBox, TransferFamily,
                       certify_box, flat_sum_family, lipschitz_radius, solve_g)

log = logging.getLogger(__name__)

CLAIMS = ("positive-measure", "thickness-product", "pinned-pnorm", "pinned-middle-third",
          "sum-circle-middle-third", "sum-circle-thickness", "annulus")

TOL_WITNESS = 1e-9
TOL_ROOT = 1e-13
GRID = 8  # 8 x 8 = 64 witness points


@dataclass
class Certificate:
    claim: str
    family: dict
    anchors: dict
    constants: dict
    alpha_interval: list | None  # [lo, hi] as floats
    value_interval: list | None
    trace: list = field(default_factory=list)
    status: str = "certified"
    reason: str = ""
    depth: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.status == "certified"

    @property
    def I(self) -> Interval | None:
        return Interval(*self.alpha_interval) if self.alpha_interval else None

    @property
    def J(self) -> Interval | None:
        return Interval(*self.value_interval) if self.value_interval else None

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))

    def to_json(self, indent: int | None = 1) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, d: dict) -> "Certificate":
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        return cls.from_dict(json.loads(text))

    def summary(self) -> str:
        lines = [f"claim: {self.claim}  status: {self.status}"]
        if self.reason:
            lines.append(f"reason: {self.reason}")
        if self.alpha_interval:
            lines.append(f"I = [{self.alpha_interval[0]:.12g}, {self.alpha_interval[1]:.12g}]")
        if self.value_interval:
            lines.append(f"J = [{self.value_interval[0]:.12g}, {self.value_interval[1]:.12g}]")
        for k in ("eta", "epsilon", "delta", "eps_tilde", "eps_hat", "e0"):
            if k in self.constants:
                lines.append(f"{k} = {self.constants[k]:.6g}")
        if self.trace:
            worst = max(w["residual"] for w in self.trace)
            lines.append(f"witnesses: {len(self.trace)}  max residual {worst:.3g}")
        return "\n".join(lines)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return float(x)
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return x


def _failed(claim, fam, reason, **kw) -> Certificate:
    return Certificate(claim, fam.to_dict() if fam else {}, kw.pop("anchors", {}),
                       kw.pop("constants", {}), None, None, status="failed", reason=reason, **kw)


def grid_points(lo: float, hi: float, n: int) -> list[float]:
    """n cell-centred points of [lo, hi]."""
    return [lo + (hi - lo) * (i + 0.5) / n for i in range(n)]


def _fmt(x) -> float:
    return float(x)


# ---------------------------------------------------------------------------
# witness extraction


def _snap(base: CantorApprox, x: float):
    """Nearest point of ``base`` that is an endpoint of a fine cover cell."""
    if base.is_self_similar:
        n = base.depth
        while float(base.cell_width(n)) > 1e-14 and n < 200:
            n += 1
    else:
        n = None
    xf = Fraction(x)
    loc = base.locate(xf, n)
    if loc.kind == "left":
        return base.hull.lo
    if loc.kind == "right":
        return base.hull.hi
    lo, hi = loc.interval.lo, loc.interval.hi
    return lo if abs(xf - lo) <= abs(hi - xf) else hi


def witness_pair(img: LazyImage, w) -> tuple:
    """(a, b) with a in the base set of ``img`` and b in the static set."""
    b = w.point_L
    x = img.ginv(float(w.point_K))
    a = _snap(img.base, x)
    return a, b


def _record(fam, c, alpha, a, b, swap: bool = False, **extra) -> dict:
    res = abs(fam.H(alpha, float(a), float(b)) - c)
    d = {"c": c, "alpha": alpha, "a": str(a), "b": str(b), "residual": res}
    d.update(extra)
    return d


def _slope_bounds(fam, A: Interval, X: Interval, Y: Interval) -> tuple[float, float]:
    Ae = Enclosure(*A.to_float())
    Xe = Enclosure(*X.to_float())
    Ye = Enclosure(*Y.to_float())
    gp = abs(-Enclosure._coerce(fam.H_x(Ae, Xe, Ye)) / Enclosure._coerce(fam.H_y(Ae, Xe, Ye)))
    return gp.lo, gp.hi


def _run_witness(fam, box, c, alpha, Kt1, Kt2, tol, slope=None, use_newhouse=True):
    img = LazyImage(fam, box, c, alpha, Kt1, TOL_ROOT)
    if use_newhouse:
        w = newhouse_intersect(img, Kt2, slope_bounds=slope or (1.0, 1.0), tol=tol)
    else:
        pair = find_gap_pair(img, Kt2)
        if pair is None:
            raise NoAdmissibleReplacement("no gap pair")
        w = iterate_gap_pairs(img, Kt2, pair, tol)
    a, b = witness_pair(img, w)
    return a, b, w


# ---------------------------------------------------------------------------
# anchors and boxes


def _choose_alpha0(fam: TransferFamily, u1: float, u2: float) -> float:
    """Parameter value giving g' closest to 1 (g increasing) at (u1, u2)."""
    if isinstance(fam, CircleSum):
        return u1 - 1 / math.sqrt(2)
    best = None
    for s in np.linspace(-0.95, 0.95, 77):
        if abs(s) < 0.05:
            continue
        a = u1 - float(s)
        try:
            gp = float(fam.g_prime(a, u1, u2))
        except (ZeroDivisionError, ValueError, BoxRejected):
            continue
        if gp <= 0 or not math.isfinite(gp):
            continue
        score = abs(math.log(gp))
        if best is None or score < best[0]:
            best = (score, a)
    if best is None:
        raise PreconditionError("no parameter value gives an increasing transfer map")
    return best[1]


def _has_free_alpha(fam) -> bool:
    return not isinstance(fam, PNormDistance)


def _certified_box(fam, c0, a0, u1, u2, radii=(0.05, 0.02, 0.01, 0.005, 0.002),
                   alpha_radius=None) -> SolverBox:
    last = None
    for d1 in radii:
        for mult in (3, 6, 12):
            cand = SolverBox(c0, a0, u1, u2, delta0=mult * d1, delta1=d1,
                             alpha_radius=alpha_radius)
            try:
                return certify_box(fam, cand)
            except BoxRejected as exc:
                last = exc
    raise last or BoxRejected("solver box", "no radius certified")


def _cylinder_len(K: CantorApprox, j: int):
    return K.scale * K.gamma ** j


def _interleave(ys_z: list, ys_v: list) -> tuple[float, list]:
    """Best pattern v < z < v < z < v (by value) maximising the smallest
    adjacent distance.  Returns (margin, chosen values)."""
    pts = sorted([(y, "z") for y in ys_z] + [(y, "v") for y in ys_v])
    pattern = "vzvzv"
    n = len(pts)
    NEG = -1.0
    best = [[NEG] * n for _ in pattern]
    back = [[-1] * n for _ in pattern]
    for i, (_, t) in enumerate(pts):
        if t == "v":
            best[0][i] = math.inf
    for k in range(1, len(pattern)):
        for i, (yi, ti) in enumerate(pts):
            if ti != pattern[k]:
                continue
            for j in range(i):
                if best[k - 1][j] == NEG:
                    continue
                m = min(best[k - 1][j], yi - pts[j][0])
                if m > best[k][i]:
                    best[k][i], back[k][i] = m, j
    i_end = max(range(n), key=lambda i: best[-1][i]) if n else -1
    if i_end < 0 or best[-1][i_end] <= 0:
        return 0.0, []
    chosen, i = [], i_end
    for k in range(len(pattern) - 1, -1, -1):
        chosen.append(pts[i][0])
        i = back[k][i]
    return best[-1][i_end], chosen[::-1]


def _endpoints(K: CantorApprox, levels: int) -> list:
    Kd = K.with_depth(min(levels, 10)) if K.is_self_similar else K
    out = []
    for iv in Kd.intervals:
        out += [iv.lo, iv.hi]
    return out


# ---------------------------------------------------------------------------
# thickness product > 1


def certify_thickness(K1: CantorApprox, K2: CantorApprox, fam: TransferFamily,
                          alpha0: float | None = None, grid: int = GRID,
                          tol: float = 1e-10, max_anchor_pairs: int = 12,
                          claim: str = "thickness-product") -> Certificate:
    """Box I x J with J inside H(α, K1, K2) for every α in I.

    Raises `ThicknessProductError` when τ(K1)·τ(K2) <= 1.
    """
    if not (K1.is_self_similar and K2.is_self_similar):
        raise PreconditionError("thickness certificates need self-similar factors")
    tau1, tau2 = thickness(K1).tau, thickness(K2).tau
    if tau1 * tau2 <= 1:
        raise ThicknessProductError(f"thickness product {float(tau1 * tau2):.6g} is not > 1")
    # largest ε from the ladder keeping τ(K2)·τ_ε(K1)·(1-ε) > 1
    eps, tau_eps = None, None
    for e in ("1/2", "3/10", "1/5", "1/10", "1/20", "1/50", "1/100", "1/1000"):
        te = thickness(K1, Fraction(e)).tau
        if tau2 * te * (1 - Fraction(e)) > 1:
            eps, tau_eps = Fraction(e), te
            break
    if eps is None:
        raise ThicknessProductError("no epsilon satisfies the distortion budget")

    gaps1 = list(K1.iter_gaps_by_size(4))
    gaps2 = list(K2.iter_gaps_by_size(4))
    tried = 0
    last_reason = "no anchor pair"
    for G1 in gaps1:
        for G2 in gaps2:
            if tried >= max_anchor_pairs:
                break
            tried += 1
            try:
                return _thickness_at(K1, K2, fam, G1, G2, eps, tau1, tau2, tau_eps,
                                         alpha0, grid, tol, claim)
            except (BoxRejected, CertificationFailed, LeftSolverBox, DepthExhausted,
                    NoAdmissibleReplacement, ValueError, ZeroDivisionError) as exc:
                last_reason = f"{type(exc).__name__}: {exc}"
    raise CertificationFailed(f"no anchor pair certified ({last_reason})")


def _thickness_at(K1, K2, fam, G1, G2, eps, tau1, tau2, tau_eps, alpha0, grid, tol,
                      claim) -> Certificate:
    u1 = G1.interval.hi  # r(G1)
    u2r = G2.interval.hi
    if _has_free_alpha(fam):
        a0 = alpha0 if alpha0 is not None else _choose_alpha0(fam, float(u1), float(u2r))
    else:
        a0 = fam.beta
    orient = 1 if float(fam.g_prime(a0, float(u1), float(u2r))) > 0 else -1
    # a decreasing map sends [u1, u1+δ] to the left of u2, so u2 = l(G2) then
    u2 = u2r if orient > 0 else G2.interval.lo
    c0 = float(fam.H(a0, float(u1), float(u2)))
    box = _certified_box(fam, c0, a0, float(u1), float(u2),
                         alpha_radius=None if _has_free_alpha(fam) else 0.02)
    eta = box.eta
    if box.orientation != orient:
        raise CertificationFailed("orientation changed inside the solver box")

    # δ <= min(δ1, ε η^7 / 8); take the largest cylinder at u1 below it
    delta_max = min(box.delta1, float(eps) * eta ** 7 / 8)
    j = G1.level
    while float(_cylinder_len(K1, j)) > delta_max:
        j += 1
    delta = _cylinder_len(K1, j)
    Kt1 = K1.cylinder(u1, delta, "right")
    g0 = lambda x: solve_g(fam, box, c0, a0, float(x), TOL_ROOT)  # noqa: E731
    img_end = g0(u1 + delta)
    reach = abs(img_end - float(u2))
    j2 = G2.level
    while float(_cylinder_len(K2, j2)) > reach:
        j2 += 1
    len2 = _cylinder_len(K2, j2)
    Kt2 = K2.cylinder(u2, len2, "right" if orient > 0 else "left")
    # ratio of g' over [u1, u1+δ] within 1 ± ε
    ratio_bound = box.g2_bound * float(delta) / box.gprime[0]
    if ratio_bound > float(eps):
        raise CertificationFailed(f"derivative ratio bound {ratio_bound:.3g} exceeds ε")
    # τ(K̃2)·τ_ε(K̃1)·(1-ε) > 1 on the restricted pieces (cylinders keep the thickness)
    tau_t2 = thickness(Kt2).tau
    tau_t1_eps = thickness(Kt1, eps).tau
    prod_eps = tau_t2 * tau_t1_eps * (1 - eps)
    if prod_eps <= 1:
        raise CertificationFailed(f"eps-thickness product {float(prod_eps):.4g} <= 1")
    # interleaving points v1 < z1 < v2 < z2 < v3; ε̃ uses the distance reading of |g0(z), g0(v)|
    zs = [g0(z) for z in _endpoints(Kt1, 6)]
    vs = [float(v) for v in _endpoints(Kt2, 6)]
    margin, chosen = _interleave(zs, vs)
    if margin <= 0:
        raise CertificationFailed("no interleaving v1 < z1 < v2 < z2 < v3 at available depth")
    eps_tilde = min(margin / 3, float(eps) * 0.999)
    eps_hat = eps_tilde * eta ** 2 / 2
    if eps_hat >= box.delta1:
        eps_hat = box.delta1 * 0.999
    I = (a0 - eps_hat, a0 + eps_hat) if _has_free_alpha(fam) else (a0, a0)
    J = (c0 - eps_hat, c0 + eps_hat)

    X = Interval(float(Kt1.hull.lo), float(Kt1.hull.hi))
    Y = Interval(float(Kt2.hull.lo) - reach, float(Kt2.hull.hi) + reach)
    slope = _slope_bounds(fam, Interval(*I), X, Y)
    trace = []
    alphas = grid_points(*I, grid) if _has_free_alpha(fam) else [a0]
    cs = grid_points(*J, grid if _has_free_alpha(fam) else grid * grid)
    for alpha in alphas:
        for c in cs:
            a, b, w = _run_witness(fam, box, c, alpha, Kt1, Kt2, tol, slope)
            trace.append(_record(fam, c, alpha, a, b, steps=w.steps))
    worst = max(t["residual"] for t in trace)
    status = "certified" if worst <= TOL_WITNESS else "failed"
    constants = {
        "eta": eta, "epsilon": float(eps), "tau_1": float(tau1), "tau_2": float(tau2),
        "tau_eps_1": float(tau_eps), "eps_thickness_product": float(prod_eps), "delta1": box.delta1,
        "delta0": box.delta0, "delta": float(delta), "delta_bound": delta_max,
        "derivative_ratio_bound": ratio_bound, "interleave_margin": margin,
        "interleave_points": chosen, "eps_tilde": eps_tilde, "eps_hat": eps_hat,
        "slope_bounds": list(slope), "orientation": box.orientation,
        "eps_tilde_reading": "distance |g0(z_i) - g0(v_j)|",
    }
    return Certificate(
        claim, fam.to_dict(),
        {"c0": c0, "alpha0": a0, "u1": str(u1), "u2": str(u2)},
        constants, list(I), list(J), trace, status,
        "" if status == "certified" else f"witness residual {worst:.3g}",
        depth=max(K1.depth, K2.depth),
        extra={"K1": {"gamma": str(K1.gamma)}, "K2": {"gamma": str(K2.gamma)},
               "K1_piece": [str(Kt1.hull.lo), str(Kt1.hull.hi)],
               "K2_piece": [str(Kt2.hull.lo), str(Kt2.hull.hi)]})


# ---------------------------------------------------------------------------
# pinned p-norm distances, simultaneously for β in a wide interval


def certify_pinned_pnorm(C: CantorApprox, t, beta0: float, alpha_radius: float = 0.06,
                         grid: int = GRID, cells: int = 8, tol: float = 1e-10) -> Certificate:
    """Distances J valid for every exponent β in I = [β0 ± alpha_radius].

    The box is split into cells; on each cell the distortion of g' over the
    domain piece and the overlap of the image hull with the target piece
    are bounded by interval arithmetic, which gives the Newhouse
    hypotheses for every (c, β) in the cell.
    """
    beta0 = float(beta0)
    if beta0 <= 1:
        raise PreconditionError("beta0 must exceed 1 (the exponent interval must exclude 1)")
    if beta0 - alpha_radius <= 1:
        alpha_radius = (beta0 - 1) / 2
    if not C.is_self_similar:
        raise PreconditionError("pinned certificates need a self-similar set")
    tau = thickness(C).tau
    if tau * tau <= 1:
        raise ThicknessProductError(f"thickness product {float(tau * tau):.6g} is not > 1")
    t = (float(t[0]), float(t[1]))
    fam = PNormDistance(t, beta0)

    candidates = []
    for m1 in (2, 3, 4):
        for m2 in (m1, m1 - 1):
            P1 = [iv for iv in C.with_depth(m1).intervals if iv.lo > t[0]]
            P2 = [iv for iv in C.with_depth(m2).intervals if iv.lo > t[1]]
            for p1 in P1:
                for p2 in P2:
                    xm, ym = float(p1.mid), float(p2.mid)
                    try:
                        slope = abs(float(fam.g_prime(beta0, xm, ym)))
                    except (ZeroDivisionError, ValueError, BoxRejected):
                        continue
                    if 0.6 < slope < 1.6:
                        candidates.append((abs(math.log(slope)), m1, m2, p1, p2))
    # equal levels first: the image then spans several gaps of the target
    candidates.sort(key=lambda r: (r[1] - r[2], r[1], r[0]))
    last = "no candidate pieces"
    for _, m1, m2, p1, p2 in candidates[:24]:
        try:
            return _pinned_cellwise(C, fam, t, beta0, alpha_radius, p1, p2, grid, cells,
                                    tol, tau)
        except (BoxRejected, CertificationFailed, LeftSolverBox, DepthExhausted,
                NoAdmissibleReplacement, ValueError, ZeroDivisionError) as exc:
            last = f"{type(exc).__name__}: {exc}"
            log.debug("pieces %s %s rejected: %s", p1, p2, last)
    raise CertificationFailed(f"pinned p-norm certification failed ({last})")


def _pinned_cellwise(C, fam, t, beta0, rA, p1, p2, grid, cells, tol, tau):
    Kt1 = C.cylinder(p1.lo, p1.length, "right")
    Kt2 = C.cylinder(p2.lo, p2.length, "right")
    u1, u2 = float(p1.mid), float(p2.mid)
    c0 = float(fam.H(beta0, u1, u2))
    len1, len2 = float(p1.length), float(p2.length)
    d0 = min(2 * len2, 0.95 * (u2 - t[1]))
    rc = len2 / 8
    while rc > len2 / 200:
        box = certify_box(fam, SolverBox(c0, beta0, u1, u2, delta0=d0,
                                         delta1=max(rc, len1 / 2) * 1.0001, alpha_radius=rA),
                          check_drift=False)
        ok, info = _pinned_cells(fam, box, beta0, rA, c0, rc, Kt1, Kt2, cells)
        if ok:
            eps = info["epsilon"]
            te = thickness(Kt1, Fraction(eps)).tau if eps < 1 else 0
            prod = float(tau) * float(te) * (1 - eps)
            if prod > 1:
                break
        rc /= 2
    else:
        raise CertificationFailed("no value radius passes the cell checks")
    I = (beta0 - rA, beta0 + rA)
    J = (c0 - rc, c0 + rc)
    trace = []
    slope = (info["slope_lo"], info["slope_hi"])
    for beta in grid_points(*I, grid):
        for c in grid_points(*J, grid):
            a, b, w = _run_witness(fam, box, c, beta, Kt1, Kt2, tol, slope)
            trace.append(_record(fam, c, beta, a, b, steps=w.steps))
    worst = max(r["residual"] for r in trace)
    status = "certified" if worst <= TOL_WITNESS else "failed"
    constants = {
        "eta": box.eta, "epsilon": eps, "tau": float(tau), "tau_eps": float(te),
        "eps_thickness_product": prod, "delta": len1, "target_length": len2,
        "linking": "checked per cell",
        "eps_hat": rc, "cells": cells, "slope_bounds": list(slope), "mode": "cellwise",
        "delta1": box.delta1, "delta0": box.delta0, "orientation": box.orientation,
    }
    return Certificate("pinned-pnorm", fam.to_dict(),
                       {"c0": c0, "alpha0": beta0, "u1": u1, "u2": u2}, constants,
                       list(I), list(J), trace, status,
                       "" if status == "certified" else f"witness residual {worst:.3g}",
                       depth=C.depth,
                       extra={"gamma": str(C.gamma), "t": list(t),
                              "K1_piece": [str(p1.lo), str(p1.hi)],
                              "K2_piece": [str(p2.lo), str(p2.hi)]})


def _meets(K: CantorApprox, a: float, b: float) -> bool:
    """True when K has a point in [a, b] (exact for self-similar covers)."""
    if a > b:
        return False
    loc = K.locate(Fraction(a))
    if loc.kind == "left":
        return K.hull.lo <= b
    if loc.kind == "right":
        return False
    # gap right ends and cover-cell right ends are points of K
    return loc.interval.hi <= b or (loc.kind == "set" and loc.interval.lo >= a)


def _pinned_cells(fam, box, beta0, rA, c0, rc, Kt1, Kt2, n):
    """Per cell: distortion ε of g' and the two linking conditions, which
    say that neither g(K̃1) nor K̃2 lies in a gap of the other."""
    hb, hc = rA / n, rc / n
    x_lo, x_hi = Kt1.hull.to_float()
    s, e = Kt2.hull.to_float()
    probes = _endpoints(Kt1, 3)
    Yw = Enclosure(*box.y_range.to_float())
    X = Enclosure(x_lo, x_hi)
    eps_max, slo, shi = 0.0, math.inf, 0.0
    bs = grid_points(beta0 - rA, beta0 + rA, n)
    cs = grid_points(c0 - rc, c0 + rc, n)
    # extreme cells fail first when anything fails
    order = sorted(((i, j) for i in range(n) for j in range(n)),
                   key=lambda ij: -(abs(2 * ij[0] - n + 1) + abs(2 * ij[1] - n + 1)))
    for i, j in order:
        bm, cm = bs[i], cs[j]
        Bc = Enclosure(bm - hb, bm + hb)
        try:
            yl = solve_g(fam, box, cm, bm, x_lo, TOL_ROOT)
            yh = solve_g(fam, box, cm, bm, x_hi, TOL_ROOT)
            Y = Yw
            for _ in range(2):
                hy = Enclosure._coerce(fam.H_y(Bc, X, Y))
                ha = Enclosure._coerce(fam.H_alpha(Bc, X, Y))
                if hy.contains_zero():
                    return False, {"reason": "H_y vanishes", "cell": (bm, cm)}
                # |∂g/∂c| = 1/|H_y|, |∂g/∂β| = |H_β/H_y|
                lip = hc / hy.mig + hb * ha.mag / hy.mig + 2 * TOL_ROOT
                p, q = min(yl, yh), max(yl, yh)
                Y = Enclosure(p - lip, q + lip)
            hx = Enclosure._coerce(fam.H_x(Bc, X, Y))
            gp = abs(-hx / hy)
            if gp.lo <= 0:
                return False, {"reason": "g' vanishes", "cell": (bm, cm)}
            eps = gp.hi / gp.lo - 1
            if eps >= 1:
                return False, {"reason": f"distortion {eps:.3g}", "cell": (bm, cm)}
            if not _meets(Kt2, p + lip, q - lip):
                return False, {"reason": "image inside a gap of the target", "cell": (bm, cm)}
            ok = False
            for x in probes:
                y = solve_g(fam, box, cm, bm, float(x), TOL_ROOT)
                if s <= y - lip and y + lip <= e:
                    ok = True
                    break
            if not ok:
                return False, {"reason": "target inside a gap of the image", "cell": (bm, cm)}
        except (LeftSolverBox, ValueError, ZeroDivisionError) as exc:
            return False, {"reason": f"{type(exc).__name__}: {exc}", "cell": (bm, cm)}
        eps_max = max(eps_max, eps)
        slo, shi = min(slo, gp.lo), max(shi, gp.hi)
    return True, {"epsilon": eps_max, "slope_lo": slo, "slope_hi": shi}


# ---------------------------------------------------------------------------
# positive-measure factors


def certify_measure(A: IntervalUnion, B: IntervalUnion, fam: TransferFamily,
                        eps0: float | None = None, grid: int = GRID) -> Certificate:
    """Box from Lebesgue density points of two interval unions."""
    compA = max(A.intervals, key=lambda iv: iv.length)
    compB = max(B.intervals, key=lambda iv: iv.length)
    if compA.length == 0 or compB.length == 0:
        raise PreconditionError("sets need positive length")
    u1, u2 = compA.mid, compB.mid  # exact density points
    fu1, fu2 = float(u1), float(u2)
    flat = getattr(fam, "name", None) == "flat-sum"
    a0 = 0.0 if flat else (_choose_alpha0(fam, fu1, fu2) if _has_free_alpha(fam) else fam.beta)
    c0 = float(fam.H(a0, fu1, fu2))
    r_in = float(min(compA.length, compB.length)) / 2
    radii = [r for r in (0.05, 0.02, 0.01, 0.005, 0.002, 0.001) if r <= r_in] or [r_in / 2]
    box = _certified_box(fam, c0, a0, fu1, fu2, radii=radii)
    eta = box.eta
    budget_cap = 0.9 / (6 / eta ** 4 + 2)
    if eps0 is None:
        eps0 = budget_cap
    if not 0 < eps0 <= budget_cap:
        raise PreconditionError(f"eps0 = {eps0} exceeds the density budget {budget_cap:.4g}")

    dhat = box.delta1
    for _ in range(40):
        dprime = dhat / eta ** 2 + eta ** 2 * dhat / 2
        wA = Interval(u1 - Fraction(dhat), u1 + Fraction(dhat))
        wB = Interval(u2 - Fraction(dprime), u2 + Fraction(dprime))
        defA, defB = A.density_deficit(wA), B.density_deficit(wB)
        if defA < eps0 and defB < eps0:
            break
        dhat /= 2
    else:
        raise CertificationFailed("no window radius reaches the density bounds")
    eps_t = lipschitz_radius(box, dhat)
    I = (a0 - eps_t, a0 + eps_t)
    J = (c0 - eps_t, c0 + eps_t)
    budget = eps0 / eta ** 4 + 2 * eps0

    xs = [fu1] + [float(u1) + dhat * k / 64 for k in range(-64, 65) if k]
    trace = []
    alphas = grid_points(*I, grid) if not flat else [a0]
    cs = grid_points(*J, grid) if not flat else grid_points(*J, grid * grid)
    for alpha in alphas:
        for c in cs:
            found = None
            for x in xs:
                if not A.contains(Fraction(x)):
                    continue
                y = solve_g(fam, box, c, alpha, x, TOL_ROOT)
                if B.contains(Fraction(y)):
                    found = (x, y)
                    break
            if found is None:
                return _failed("positive-measure", fam, f"no witness at c={c}, alpha={alpha}")
            trace.append(_record(fam, c, alpha, Fraction(found[0]), Fraction(found[1])))
    worst = max(r["residual"] for r in trace)
    extra = {"A": A.to_list(), "B": B.to_list()}
    if flat:
        S = A.minkowski_sum(B)
        extra["minkowski_contains_J"] = S.component_containing(Fraction(J[0])) is not None and \
            S.component_containing(Fraction(J[0])) is S.component_containing(Fraction(J[1]))
    constants = {"eta": eta, "eps0": eps0, "eps0_cap": budget_cap, "delta_hat": dhat,
                 "delta_prime": dprime, "eps_tilde": eps_t, "eps_hat": eps_t,
                 "density_deficit_A": float(defA), "density_deficit_B": float(defB),
                 "budget_sum": budget, "delta1": box.delta1}
    status = "certified" if worst <= TOL_WITNESS and budget < 1 else "failed"
    return Certificate("positive-measure", fam.to_dict(),
                       {"c0": c0, "alpha0": a0, "u1": str(u1), "u2": str(u2)}, constants,
                       list(I), list(J), trace, status,
                       "" if status == "certified" else "residual or budget", 0, extra)


# ---------------------------------------------------------------------------
# middle-third set: slope-in-(1,3) linking arguments


def _middle_third(depth: int = 16) -> CantorApprox:
    return build_self_similar(Fraction(1, 3), depth)


def _gap_endpoints_mt(max_level: int):
    """(point, level, side) for gap endpoints of C_{1/3} up to ``max_level``;
    side "L" marks left endpoints of gaps (the set C_L), "R" right ones."""
    C = _middle_third(max_level)
    out = []
    for g in C.iter_gaps_by_size(max_level):
        out.append((g.interval.lo, g.level, "L"))
        out.append((g.interval.hi, g.level, "R"))
    return out


def certify_sum_circle_middle_third(eps: float = 0.05, s: float = 0.9, grid: int = GRID,
                                    tol: float = 1e-10, max_M: int = 10) -> Certificate:
    """Open box inside C(1/3) + S¹ from the slope-in-(1,3) gap-pair argument.

    With h_{t,α}(x) = t - √(1 - (α - x)²) and u1, u2 left gap endpoints of
    C_{1/3}, the checks below establish on the closed box
    (α, t) ∈ I x J: h' ∈ (1+ε, 3-ε) on [u1 - δ, u1], and the linking
    h(u1 - δ) < u2 - δ < h(u1) < u2.
    """
    C = _middle_third()
    fam = CircleSum()
    slope0 = s / math.sqrt(1 - s * s)
    if not 1 + 2 * eps <= slope0 <= 3 - 2 * eps:
        raise PreconditionError(f"slope {slope0:.4g} at s={s} is outside [1+2ε, 3-2ε]")
    last = "no anchors"
    for (u1, l1, sd1) in _gap_endpoints_mt(3):
        if sd1 != "L":
            continue
        for (u2, l2, sd2) in _gap_endpoints_mt(3):
            if sd2 != "L":
                continue
            try:
                return _sum_mt_at(C, fam, u1, u2, max(l1, l2), eps, s, grid, tol, max_M)
            except (CertificationFailed, BoxRejected, LeftSolverBox, DepthExhausted,
                    NoAdmissibleReplacement) as exc:
                last = f"{type(exc).__name__}: {exc}"
    raise CertificationFailed(f"no box certified ({last})")


def _sum_mt_at(C, fam, u1, u2, level, eps, s, grid, tol, max_M):
    a0 = float(u1) - s
    t0 = float(u2) + math.sqrt(1 - s * s)
    for M in range(max(level, 2), max_M + 1):
        delta = Fraction(1, 3 ** M)
        dp = float(delta) / 5
        Ilo, Ihi = a0 + 0.05 * dp, a0 + 0.95 * dp
        Jlo, Jhi = t0 - 0.95 * dp, t0 - 0.05 * dp
        A = Enclosure(Ilo, Ihi)
        T = Enclosure(Jlo, Jhi)
        X = Enclosure(float(u1 - delta), float(u1))
        S = X - A
        slope = S / (1 - S.sqr()).sqrt()
        h_u1 = T - (1 - (A - float(u1)).sqr()).sqrt()
        h_lo = T - (1 - (A - float(u1 - delta)).sqr()).sqrt()
        checks = {
            "slope_in_range": slope.lo > 1 + eps and slope.hi < 3 - eps,
            "h_u1_above": h_u1.lo > float(u2 - delta),
            "h_u1_below": h_u1.hi < float(u2),
            "h_left_below": h_lo.hi < float(u2 - delta),
        }
        if all(checks.values()):
            break
    else:
        raise CertificationFailed(f"no M <= {max_M} passes the slope/linking checks")
    dom = C.cylinder(u1, delta, "left")
    ym = float(fam.H(a0, float(u1 - delta / 2), 0.0))  # y-independent part
    u2c = t0 - (ym - 0.0)  # h_{t0,α0}(u1 - δ/2)
    box = certify_box(fam, SolverBox(t0, a0, float(u1 - delta / 2), u2c,
                                     delta0=8 * float(delta), delta1=0.6 * float(delta)))
    trace = []
    for alpha in grid_points(Ilo, Ihi, grid):
        for t in grid_points(Jlo, Jhi, grid):
            a, b, w = _run_witness(fam, box, t, alpha, dom, C, tol, use_newhouse=False)
            trace.append(_record(fam, t, alpha, a, b, steps=w.steps))
    worst = max(r["residual"] for r in trace)
    status = "certified" if worst <= TOL_WITNESS else "failed"
    constants = {"epsilon": eps, "M": M, "delta": float(delta), "delta_prime": dp,
                 "eta": box.eta, "slope_enclosure": [slope.lo, slope.hi],
                 "h_u1_enclosure": [h_u1.lo, h_u1.hi], "h_left_enclosure": [h_lo.lo, h_lo.hi],
                 "eps_hat": (Ihi - Ilo) / 2}
    return Certificate("sum-circle-middle-third", fam.to_dict(),
                       {"c0": t0, "alpha0": a0, "u1": str(u1), "u2": str(u2)}, constants,
                       [Ilo, Ihi], [Jlo, Jhi], trace, status,
                       "" if status == "certified" else f"witness residual {worst:.3g}",
                       depth=C.depth, extra={"gamma": "1/3", "checks": checks,
                                             "value_meaning": "t with (alpha, t) in C(1/3)+S^1"})


def _parse_point(t):
    if isinstance(t, str):
        t = t.split(",")
    return tuple(Fraction(str(v).strip()) if not isinstance(v, float) else Fraction(v)
                 for v in t)


def certify_pinned_middle_third(t, eps: float = 0.05, grid: int = GRID, tol: float = 1e-10,
                                max_M: int = 12) -> Certificate:
    """Interval V of Euclidean distances from t ∈ C(1/3) to C(1/3)."""
    t = _parse_point(t)
    for i, ti in enumerate(t):
        if membership(ti, Fraction(1, 3), Fraction(1, 10 ** 12)) == "out":
            raise PreconditionError(f"t{i + 1} = {ti} is not in the middle-third Cantor set")
    # symmetry reduction: x -> 1 - x maps C_{1/3} to itself
    reflect = tuple(ti > Fraction(1, 2) for ti in t)
    tr = tuple(1 - ti if r else ti for ti, r in zip(t, reflect))
    C = _middle_third()
    pts = _gap_endpoints_mt(6)
    cands = []
    for (u1, l1, s1) in pts:
        if s1 != "L" or u1 <= tr[0]:
            continue
        for (u2, l2, s2) in pts:
            if s2 != "R" or u2 <= tr[1]:
                continue
            ratio = (u1 - tr[0]) / (u2 - tr[1])
            if 1 + 2 * eps <= ratio <= 3 - 2 * eps:
                cands.append((max(l1, l2), abs(float(ratio) - 2), u1, u2))
    cands.sort(key=lambda r: (r[0], r[1]))
    last = "no admissible (u1, u2)"
    for lvl, _, u1, u2 in cands[:40]:
        try:
            cert = _pinned_mt_at(C, tr, u1, u2, lvl, eps, grid, tol, max_M)
        except (CertificationFailed, BoxRejected, LeftSolverBox, DepthExhausted,
                NoAdmissibleReplacement) as exc:
            last = f"{type(exc).__name__}: {exc}"
            continue
        cert.extra.update({"t": [str(v) for v in t], "reflected": list(reflect),
                           "t_reduced": [str(v) for v in tr]})
        if any(reflect):
            for rec in cert.trace:
                if reflect[0]:
                    rec["a"] = str(1 - Fraction(rec["a"]))
                if reflect[1]:
                    rec["b"] = str(1 - Fraction(rec["b"]))
            cert.family = PNormDistance(tuple(float(v) for v in t), 2.0).to_dict()
        return cert
    raise CertificationFailed(f"pinned middle-third certification failed ({last})")


def _pinned_mt_at(C, t, u1, u2, lvl, eps, grid, tol, max_M):
    t1, t2 = t
    v0 = math.sqrt(float((u1 - t1) ** 2 + (u2 - t2) ** 2))
    for M in range(max(lvl, 1), max_M + 1):
        delta = Fraction(1, 3 ** M)
        dp = 0.8 * float(delta) * float(u2 - t2) / v0
        Vlo, Vhi = v0 + 0.05 * dp, v0 + 0.95 * dp
        V = Enclosure(Vlo, Vhi)
        X = Enclosure(float(u1 - delta), float(u1)) - float(t1)
        try:
            root = (V.sqr() - X.sqr()).sqrt()
            slope = X / root
            g_u1 = float(t2) + (V.sqr() - (float(u1) - float(t1)) ** 2).sqrt()
            g_left = float(t2) + (V.sqr() - (float(u1 - delta) - float(t1)) ** 2).sqrt()
        except (ValueError, ZeroDivisionError):
            continue
        checks = {
            "slope_in_range": slope.lo > 1 + eps and slope.hi < 3 - eps,
            "g_u1_above": g_u1.lo > float(u2),
            "g_u1_below": g_u1.hi < float(u2 + delta),
            "g_left_above": g_left.lo > float(u2 + delta),
        }
        if all(checks.values()):
            break
    else:
        raise CertificationFailed(f"no M <= {max_M} passes the slope/linking checks")
    fam = PNormDistance((float(t1), float(t2)), 2.0)
    dom = C.cylinder(u1, delta, "left")
    xc = float(u1 - delta / 2)
    yc = float(t2) + math.sqrt(v0 ** 2 - (xc - float(t1)) ** 2)
    box = certify_box(fam, SolverBox(v0, 2.0, xc, yc, delta0=min(8 * float(delta), 0.9 * (yc - float(t2))),
                                     delta1=max(0.6 * float(delta), dp), alpha_radius=0.0))
    trace = []
    for v in grid_points(Vlo, Vhi, grid * grid):
        a, b, w = _run_witness(fam, box, v, 2.0, dom, C, tol, use_newhouse=False)
        trace.append(_record(fam, v, 2.0, a, b, steps=w.steps))
    worst = max(r["residual"] for r in trace)
    status = "certified" if worst <= TOL_WITNESS else "failed"
    constants = {"epsilon": eps, "M": M, "delta": float(delta), "delta_prime": dp, "v0": v0,
                 "eta": box.eta, "slope_enclosure": [slope.lo, slope.hi],
                 "ratio": float((u1 - t1) / (u2 - t2)), "eps_hat": (Vhi - Vlo) / 2}
    return Certificate("pinned-middle-third", fam.to_dict(),
                       {"c0": v0, "alpha0": 2.0, "u1": str(u1), "u2": str(u2)}, constants,
                       [2.0, 2.0], [Vlo, Vhi], trace, status,
                       "" if status == "certified" else f"witness residual {worst:.3g}",
                       depth=C.depth, extra={"gamma": "1/3", "checks": checks})


# ---------------------------------------------------------------------------
# annulus


def _gamma(x: float) -> float:
    return math.sqrt(1 - x * x)


def _abs_gamma_prime(s: float) -> float:
    return abs(s) / math.sqrt(1 - s * s)


def _pole_width(alpha: float, delta: float, X: IntervalUnion, Y: IntervalUnion,
                sign: int) -> tuple[float, dict]:
    """Half-width e(α) of the band of c around sign·γ(α) covered at column α.

    Moving factor X (the variable x), static factor Y.  Case 1 (|α| <= δ)
    uses J1 = [α-δ, α] (mirrored for α < 0), case 2 uses J1 = [0, δ/2]
    (mirrored).  e(α) = |J2| - sup|g'|·|X^c ∩ J1| - |Y^c ∩ J2|.
    """
    if abs(alpha) <= delta:
        J1 = (alpha - delta, alpha) if alpha >= 0 else (alpha, alpha + delta)
        case = 1
    else:
        J1 = (0.0, delta / 2) if alpha > 0 else (-delta / 2, 0.0)
        case = 2
    # g(x) = sign·(γ(α) - γ(α - x)) maps J1 onto J2 (0 ∈ J2)
    e1 = sign * (_gamma(alpha) - _gamma(alpha - J1[0]))
    e2 = sign * (_gamma(alpha) - _gamma(alpha - J1[1]))
    J2 = (min(e1, e2), max(e1, e2))
    L2 = J2[1] - J2[0]
    sup_gp = max(_abs_gamma_prime(alpha - J1[0]), _abs_gamma_prime(alpha - J1[1]))
    miss_X = float(Fraction(J1[1]) - Fraction(J1[0])
                   - X.measure_in(Interval(Fraction(J1[0]), Fraction(J1[1]))))
    miss_Y = float(Fraction(J2[1]) - Fraction(J2[0])
                   - Y.measure_in(Interval(Fraction(J2[0]), Fraction(J2[1]))))
    e = L2 - sup_gp * miss_X - miss_Y
    return e, {"case": case, "J1": J1, "J2": J2, "L2": L2}


def certify_annulus(A: IntervalUnion, B: IntervalUnion, alpha_max: float = 0.75,
                    samples: int = 401, delta_cap: float = 0.5) -> Certificate:
    """Neighbourhood of S¹ inside (A x B) + S¹ when 0 is a density point of A, B.

    For interval unions 0 must be interior to a component of each set.
    """
    ca, cb = A.component_containing(0), B.component_containing(0)
    if ca is None or cb is None or not ca.contains(0, open=True) or not cb.contains(0, open=True):
        raise PreconditionError("0 must be an interior point of both A and B (shift the sets first)")
    delta = min(-ca.lo, ca.hi, Fraction(delta_cap))  # exact
    for _ in range(60):
        dprime = Fraction(1 - _gamma(float(delta)))
        windows = [A.density_deficit(Interval(-delta, Fraction(0))),
                   A.density_deficit(Interval(Fraction(0), delta)),
                   B.density_deficit(Interval(-dprime, Fraction(0))),
                   B.density_deficit(Interval(Fraction(0), dprime))]
        eps = float(max(windows))
        if 7 * eps < 1:
            break
        delta /= 2
    else:
        raise CertificationFailed("density windows never reach 7ε < 1")
    delta, dprime = float(delta), float(dprime)
    e0 = delta ** 2 * (1 - 7 * eps) / 2
    alphas = np.linspace(-alpha_max, alpha_max, samples)
    poles = {"N": (A, B, 1), "S": (A, B, -1), "E": (B, A, 1), "W": (B, A, -1)}
    widths = {}
    for name, (X, Y, sign) in poles.items():
        widths[name] = [_pole_width(float(a), delta, X, Y, sign)[0] for a in alphas]
    mins = {k: min(v) for k, v in widths.items()}
    # poles proper: |α| <= δ
    near = np.abs(alphas) <= delta
    pole_min = {k: float(np.min(np.asarray(v)[near])) for k, v in widths.items()}
    e_min = min(mins.values())
    # a radial band of half-width w sits inside every column band when
    # (2w + w²)/(2√(1 - α_max²)) < e_min; keep a 10% margin
    ca_ = math.sqrt(1 - alpha_max ** 2)
    w = 0.9 * e_min * ca_ / (1 + e_min)
    status = "certified" if e_min > 0 and all(2 * v >= 2 * e0 for v in pole_min.values()) \
        else "failed"
    constants = {"delta": delta, "delta_prime": dprime, "epsilon": eps, "e0": e0,
                 "pole_width_min": {k: 2 * v for k, v in pole_min.items()},
                 "band_halfwidth_min": mins, "radial_halfwidth": w, "alpha_max": alpha_max}
    extra = {"A": A.to_list(), "B": B.to_list(),
             "alphas": alphas.tolist(), "widths": widths,
             "inner_radius": 1 - w, "outer_radius": 1 + w}
    return Certificate("annulus", {"family": "circle-sum"}, {"c0": 1.0, "alpha0": 0.0,
                                                            "u1": "0", "u2": "0"},
                       constants, [-alpha_max, alpha_max], [1 - w, 1 + w], [], status,
                       "" if status == "certified" else "pole width below 2 e0",
                       0, extra)


def certify(claim: str, **kw) -> Certificate:
    """Dispatch by claim name (used by the CLI)."""
    if claim in ("thickness-product", "sum-circle-thickness"):
        return certify_thickness(kw["K1"], kw["K2"], kw["family"], claim=claim)
    if claim == "pinned-pnorm":
        return certify_pinned_pnorm(kw["C"], kw["t"], kw["beta0"])
    if claim == "pinned-middle-third":
        return certify_pinned_middle_third(kw["t"])
    if claim == "sum-circle-middle-third":
        return certify_sum_circle_middle_third()
    if claim == "positive-measure":
        return certify_measure(kw["A"], kw["B"], kw["family"])
    if claim == "annulus":
        return certify_annulus(kw["A"], kw["B"])
    raise PreconditionError(f"unknown claim {claim!r}")
