"""Implicit transfer maps g_{c,α} defined by H(α, x, g(x)) = c.

Families evaluate H and its partials on plain floats or on `Enclosure`s, so
the same formula serves the root solver and the interval certification of a
solver box.  `certify_box` records the constant η with

    η < |H_x|, |H_y| < 1/η      and hence   η² <= |g'| <= 1/η²,

and additionally shrinks η until |g''| <= 4/η⁵ holds for the rigorous
enclosure of g'' over the box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable

from .cantor import CantorApprox, Location
from .errors import BoxRejected, LeftSolverBox, PreconditionError
from .intervals import Enclosure, Interval, Real, log, merge_intervals, power, sqrt

ETA_SAFETY = 0.99


def _is_enc(*vals) -> bool:
    return any(isinstance(v, Enclosure) for v in vals)


def _signed_offset(v, t, name: str):
    """Return (|v - t|, sign) where the sign must be constant over ``v``."""
    d = v - t
    if isinstance(d, Enclosure):
        if d.contains_zero():
            raise BoxRejected("domain", f"{name} straddles the pin")
        return (d, 1) if d.lo > 0 else (-d, -1)
    if d == 0:
        raise BoxRejected("domain", f"{name} equals the pin")
    return (d, 1) if d > 0 else (-d, -1)


class TransferFamily:
    """A C² family H(α, x, y) with partial derivatives."""

    id = "custom"

    def H(self, a, x, y): raise NotImplementedError
    def H_alpha(self, a, x, y): raise NotImplementedError
    def H_x(self, a, x, y): raise NotImplementedError
    def H_y(self, a, x, y): raise NotImplementedError
    def H_xx(self, a, x, y): raise NotImplementedError
    def H_xy(self, a, x, y): raise NotImplementedError
    def H_yy(self, a, x, y): raise NotImplementedError

    def check_box(self, A, X, Y) -> None:
        """Raise `BoxRejected` if the box leaves the family's domain."""

    def explicit_g(self, c, a, x):
        """Closed-form g_{c,α}(x) when available (used only by oracles/tests)."""
        return None

    def to_dict(self) -> dict:
        return {"family": self.id}

    def g_prime(self, a, x, y):
        return -self.H_x(a, x, y) / self.H_y(a, x, y)


class GeneralizedProduct(TransferFamily):
    """H(α,x,y) = z(x,y) + γ(α - x) with z bilinear and γ(s) = √(1 - s²).

    A point (α, H(α,a,b)) lies in P_z(A,B) + S¹ whenever a ∈ A, b ∈ B.
    """

    id = "generalized-product"

    def __init__(self, coeffs=(0.0, 0.0, 1.0, 0.0)):
        k = [float(v) for v in coeffs]
        if len(k) != 4:
            raise ValueError("bilinear z needs 4 coefficients k0 + k1 x + k2 y + k3 xy")
        self.k = k

    def _s(self, a, x):
        d = a - x
        q = 1 - d * d if not isinstance(d, Enclosure) else 1 - d.sqr()
        return d, sqrt(q)

    def z(self, x, y):
        k0, k1, k2, k3 = self.k
        return k0 + k1 * x + k2 * y + k3 * x * y

    def H(self, a, x, y):
        return self.z(x, y) + self._s(a, x)[1]

    def H_alpha(self, a, x, y):
        d, s = self._s(a, x)
        return -d / s

    def H_x(self, a, x, y):
        d, s = self._s(a, x)
        return self.k[1] + self.k[3] * y + d / s

    def H_y(self, a, x, y):
        return self.k[2] + self.k[3] * x

    def H_xx(self, a, x, y):
        _, s = self._s(a, x)
        return -1 / (s * s * s)

    def H_xy(self, a, x, y):
        return self.k[3] + 0 * x

    def H_yy(self, a, x, y):
        return 0 * x

    def check_box(self, A, X, Y):
        d = A - X
        if d.mag >= 1:
            raise BoxRejected("domain", "|alpha - x| must stay below 1")
        if self.k != [0.0, 0.0, 1.0, 0.0] and X.contains_zero() and Y.contains_zero():
            raise BoxRejected("domain", "box contains the excluded origin of z")

    def explicit_g(self, c, a, x):
        k0, k1, k2, k3 = self.k
        return (c - math.sqrt(1 - (a - x) ** 2) - k0 - k1 * x) / (k2 + k3 * x)

    def to_dict(self):
        return {"family": self.id, "z": "bilinear", "coeffs": self.k}


class CircleSum(GeneralizedProduct):
    """H(α,x,y) = y + √(1 - (α - x)²); level sets give C×C + S¹."""

    id = "circle-sum"

    def __init__(self):
        super().__init__((0.0, 0.0, 1.0, 0.0))

    def H_x(self, a, x, y):
        d, s = self._s(a, x)
        return d / s

    def H_y(self, a, x, y):
        return 1 + 0 * x

    def explicit_g(self, c, a, x):
        return c - math.sqrt(1 - (a - x) ** 2)

    def to_dict(self):
        return {"family": self.id}


class PNormDistance(TransferFamily):
    """H(β,x,y) = (|x-t₁|^β + |y-t₂|^β)^(1/β), the β-norm distance to the pin.

    The parameter α of the general machinery is the exponent β here.
    """

    id = "pnorm"

    def __init__(self, t=(0.0, 0.0), beta: float = 2.0):
        self.t = (float(t[0]), float(t[1]))
        self.beta = float(beta)

    def _parts(self, b, x, y):
        X, s1 = _signed_offset(x, self.t[0], "x")
        Y, s2 = _signed_offset(y, self.t[1], "y")
        S = power(X, b) + power(Y, b)
        r = power(S, 1 / b)
        return X, Y, s1, s2, S, r

    def H(self, b, x, y):
        return self._parts(b, x, y)[5]

    def H_x(self, b, x, y):
        X, Y, s1, s2, S, r = self._parts(b, x, y)
        return s1 * power(X / r, b - 1)

    def H_y(self, b, x, y):
        X, Y, s1, s2, S, r = self._parts(b, x, y)
        return s2 * power(Y / r, b - 1)

    def H_alpha(self, b, x, y):
        X, Y, s1, s2, S, r = self._parts(b, x, y)
        Sb = power(X, b) * log(X) + power(Y, b) * log(Y)
        return r * (Sb / (b * S) - log(S) / (b * b))

    def H_xx(self, b, x, y):
        X, Y, s1, s2, S, r = self._parts(b, x, y)
        return (b - 1) * power(X, b - 2) * power(Y, b) * power(r, 1 - 2 * b)

    def H_xy(self, b, x, y):
        X, Y, s1, s2, S, r = self._parts(b, x, y)
        return (1 - b) * (s1 * s2) * power(X, b - 1) * power(Y, b - 1) * power(r, 1 - 2 * b)

    def H_yy(self, b, x, y):
        X, Y, s1, s2, S, r = self._parts(b, x, y)
        return (b - 1) * power(Y, b - 2) * power(X, b) * power(r, 1 - 2 * b)

    def check_box(self, A, X, Y):
        if A.contains(1.0):
            raise BoxRejected("domain", "the exponent interval must exclude 1")
        if A.lo <= 0:
            raise BoxRejected("domain", "exponent must be positive")
        _signed_offset(X, self.t[0], "x")
        _signed_offset(Y, self.t[1], "y")

    def explicit_g(self, c, b, x):
        X = abs(x - self.t[0])
        return self.t[1] + (c ** b - X ** b) ** (1 / b)

    def to_dict(self):
        return {"family": self.id, "t": list(self.t), "beta": self.beta}


class CustomFamily(TransferFamily):
    """Plug-in point: user-supplied H and partials (float/Enclosure aware)."""

    id = "custom"

    def __init__(self, name: str, H: Callable, H_alpha: Callable, H_x: Callable,
                 H_y: Callable, H_xx: Callable | None = None, H_xy: Callable | None = None,
                 H_yy: Callable | None = None, explicit_g: Callable | None = None):
        zero = lambda a, x, y: 0 * x  # noqa: E731
        self.name = name
        self._f = dict(H=H, H_alpha=H_alpha, H_x=H_x, H_y=H_y,
                       H_xx=H_xx or zero, H_xy=H_xy or zero, H_yy=H_yy or zero)
        self._g = explicit_g

    def H(self, a, x, y): return self._f["H"](a, x, y)
    def H_alpha(self, a, x, y): return self._f["H_alpha"](a, x, y)
    def H_x(self, a, x, y): return self._f["H_x"](a, x, y)
    def H_y(self, a, x, y): return self._f["H_y"](a, x, y)
    def H_xx(self, a, x, y): return self._f["H_xx"](a, x, y)
    def H_xy(self, a, x, y): return self._f["H_xy"](a, x, y)
    def H_yy(self, a, x, y): return self._f["H_yy"](a, x, y)

    def explicit_g(self, c, a, x):
        return self._g(c, a, x) if self._g else None

    def to_dict(self):
        return {"family": self.id, "name": self.name}


def flat_sum_family() -> CustomFamily:
    """H(α,x,y) = x + y: no α dependence, level sets are A + B."""
    one = lambda a, x, y: 1 + 0 * x  # noqa: E731
    return CustomFamily("flat-sum", H=lambda a, x, y: x + y, H_alpha=lambda a, x, y: 0 * x,
                        H_x=one, H_y=one, explicit_g=lambda c, a, x: c - x)


def family_from_dict(d: dict) -> TransferFamily:
    kind = d.get("family")
    if kind == "circle-sum":
        return CircleSum()
    if kind in ("pnorm", "pnorm-distance"):
        return PNormDistance(tuple(d.get("t", (0, 0))), float(d.get("beta", 2.0)))
    if kind == "generalized-product":
        if d.get("z", "bilinear") != "bilinear":
            raise PreconditionError("only bilinear z surfaces are supported")
        return GeneralizedProduct(d.get("coeffs", (0, 0, 1, 0)))
    if kind == "custom" and d.get("name") == "flat-sum":
        return flat_sum_family()
    raise PreconditionError(f"unknown family spec {d!r}")


# ---------------------------------------------------------------------------
# solver boxes


@dataclass(frozen=True)
class SolverBox:
    """Neighbourhood of (c₀, α₀, u₁, u₂) where g_{c,α} is well defined.

    c and x range over ±δ₁, α over ±alpha_radius (default δ₁), and the
    solver searches y in [u₂ - δ₀, u₂ + δ₀].
    """

    c0: float
    alpha0: float
    u1: float
    u2: float
    delta0: float
    delta1: float
    alpha_radius: float | None = None
    eta: float | None = None
    orientation: int = 1  # +1: g increasing, -1: g decreasing
    gprime: tuple[float, float] | None = None  # enclosure of |g'|
    g2_bound: float | None = None
    halpha_bound: float | None = None
    hy_min: float | None = None
    residual: float | None = None

    @property
    def a_rad(self) -> float:
        return self.delta1 if self.alpha_radius is None else self.alpha_radius

    @property
    def c_range(self) -> Interval:
        return Interval(self.c0 - self.delta1, self.c0 + self.delta1)

    @property
    def alpha_range(self) -> Interval:
        return Interval(self.alpha0 - self.a_rad, self.alpha0 + self.a_rad)

    @property
    def x_range(self) -> Interval:
        return Interval(self.u1 - self.delta1, self.u1 + self.delta1)

    @property
    def y_range(self) -> Interval:
        return Interval(self.u2 - self.delta0, self.u2 + self.delta0)

    def enclosures(self):
        A = Enclosure(*self.alpha_range.to_float())
        X = Enclosure(*self.x_range.to_float())
        Y = Enclosure(*self.y_range.to_float())
        return A, X, Y

    def to_dict(self) -> dict:
        d = {k: v for k, v in self.__dict__.items()}
        d["gprime"] = list(self.gprime) if self.gprime else None
        return d


def certify_box(fam: TransferFamily, cand: SolverBox, check_drift: bool = True) -> SolverBox:
    """Interval-certify ``cand``; return it with η and derivative bounds set.

    ``check_drift=False`` skips the continuation bound; callers that bound
    the image range themselves (cellwise certificates) use it.
    """
    A, X, Y = cand.enclosures()
    fam.check_box(A, X, Y)
    try:
        hx = fam.H_x(A, X, Y)
        hy = fam.H_y(A, X, Y)
        ha = abs(fam.H_alpha(A, X, Y))
    except (ZeroDivisionError, ValueError) as exc:
        raise BoxRejected("domain", str(exc)) from exc
    hx, hy = Enclosure._coerce(hx), Enclosure._coerce(hy)
    if hx.contains_zero():
        raise BoxRejected("H_x vanishes", f"H_x enclosure {hx} contains 0")
    if hy.contains_zero():
        raise BoxRejected("H_y vanishes", f"H_y enclosure {hy} contains 0")
    gp = -hx / hy
    orientation = 1 if gp.lo > 0 else -1
    agp = abs(gp)
    try:
        g2 = -(fam.H_xx(A, X, Y) + 2 * fam.H_xy(A, X, Y) * gp
               + fam.H_yy(A, X, Y) * gp.sqr()) / hy
        g2 = Enclosure._coerce(g2)
    except (ZeroDivisionError, ValueError) as exc:
        raise BoxRejected("second derivative", str(exc)) from exc
    cands = [1.0, hx.mig, hy.mig, 1 / hx.mag, 1 / hy.mag]
    ha_mag = Enclosure._coerce(ha).mag
    if ha_mag > 0:
        cands.append(1 / ha_mag)
    if g2.mag > 0:
        cands.append((4 / g2.mag) ** 0.2)
    eta = ETA_SAFETY * min(cands)

    resid = abs(fam.H(cand.alpha0, cand.u1, cand.u2) - cand.c0)
    # every g_{c,α} on the box stays inside the y-range (continuation bound)
    drift = (resid / hy.mig + cand.delta1 / hy.mig + cand.a_rad * ha_mag / hy.mig
             + cand.delta1 * agp.mag)
    if check_drift and drift >= cand.delta0:
        raise BoxRejected("y-range", f"transfer maps may leave [u2 ± δ0] (drift {drift:.3g} >= {cand.delta0:.3g})")
    return replace(cand, eta=eta, orientation=orientation, gprime=(agp.lo, agp.hi),
                   g2_bound=g2.mag, halpha_bound=ha_mag, hy_min=hy.mig, residual=resid)


def _check_inside(box: SolverBox, c, a, x):
    if not box.c_range.contains(c):
        raise LeftSolverBox(f"c={c} outside {box.c_range}")
    if not box.alpha_range.contains(a):
        raise LeftSolverBox(f"alpha={a} outside {box.alpha_range}")
    if not box.x_range.contains(x):
        raise LeftSolverBox(f"x={x} outside {box.x_range}")


def _bracket_solve(f, df, lo: float, hi: float, target_abs: float, what: str) -> float:
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise LeftSolverBox(f"root in {what} not bracketed by [{lo}, {hi}]")
    inc = fhi > 0
    y = 0.5 * (lo + hi)
    for _ in range(200):
        fy = f(y)
        if abs(fy) <= target_abs:
            return y
        if (fy > 0) == inc:
            hi = y
        else:
            lo = y
        # safeguarded Newton step, bisection when it leaves the bracket
        d = df(y)
        nxt = y - fy / d if d else None
        if nxt is None or not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        if nxt == y or hi - lo <= 4 * math.ulp(max(abs(lo), abs(hi), 1.0)):
            return y if abs(fy) <= abs(f(nxt)) else nxt
        y = nxt
    return y


def solve_g(fam: TransferFamily, box: SolverBox, c, a, x, tol: float = 1e-12,
            check: bool = True) -> float:
    """y = g_{c,α}(x) with |H(α,x,y) - c| <= tol·η."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    c, a, x = float(c), float(a), float(x)
    if check:
        _check_inside(box, c, a, x)
    eta = box.eta or 1.0
    lo, hi = box.y_range.to_float()
    return _bracket_solve(lambda y: fam.H(a, x, y) - c, lambda y: fam.H_y(a, x, y),
                          lo, hi, tol * eta, "y")


def solve_x(fam: TransferFamily, box: SolverBox, c, a, y, x_lo: float, x_hi: float,
            tol: float = 1e-12) -> float:
    """Inverse transfer map: x in [x_lo, x_hi] with H(α,x,y) = c."""
    eta = box.eta or 1.0
    c, a, y = float(c), float(a), float(y)
    return _bracket_solve(lambda x: fam.H(a, x, y) - c, lambda x: fam.H_x(a, x, y),
                          float(x_lo), float(x_hi), tol * eta, "x")


def lipschitz_radius(box: SolverBox, delta_hat: float) -> float:
    """ε̃ = η⁴δ̂/4, the (c,α) radius keeping ‖g - g₀‖ below η²δ̂/2."""
    if box.eta is None:
        raise PreconditionError("box is not certified")
    if not 0 < delta_hat <= box.delta1:
        raise PreconditionError("need 0 < delta_hat <= delta1")
    return min(box.eta ** 4 * delta_hat / 4, box.delta1)


# ---------------------------------------------------------------------------
# images of Cantor sets


class LazyImage:
    """g_{c,α}(K) for a self-similar or explicit K, located point by point.

    Gap endpoints of the image are images of exact gap endpoints of K, so
    each is a genuine point of g(K) up to solver tolerance ``tol``.
    """

    def __init__(self, fam: TransferFamily, box: SolverBox, c, a, K: CantorApprox,
                 tol: float = 1e-13):
        self.fam, self.box, self.c, self.a, self.base, self.tol = fam, box, float(c), float(a), K, tol
        x0, x1 = K.hull.to_float()
        if not box.x_range.contains_interval(Interval(x0, x1)):
            raise PreconditionError("hull of K is not inside the solver box x-range")
        self.increasing = box.orientation > 0 if box.eta is not None else \
            fam.g_prime(self.a, 0.5 * (x0 + x1), self.g((x0 + x1) / 2)) > 0
        ends = (self.g(x0), self.g(x1))
        self.hull = Interval(min(ends), max(ends))
        self.depth = K.depth
        self.source = "image"

    def g(self, x) -> float:
        return solve_g(self.fam, self.box, self.c, self.a, float(x), self.tol, check=False)

    def ginv(self, y) -> float:
        x0, x1 = self.base.hull.to_float()
        return solve_x(self.fam, self.box, self.c, self.a, float(y), x0, x1, self.tol)

    def map_interval(self, iv: Interval) -> Interval:
        p, q = self.g(iv.lo), self.g(iv.hi)
        return Interval(p, q) if p <= q else Interval(q, p)

    def preimage_endpoint(self, y_end: str, iv: Interval):
        """Which endpoint of the base interval maps to the image's lo/hi."""
        if self.increasing:
            return iv.lo if y_end == "lo" else iv.hi
        return iv.hi if y_end == "lo" else iv.lo

    def locate(self, p, depth: int | None = None) -> Location:
        if p < self.hull.lo:
            return Location("left")
        if p > self.hull.hi:
            return Location("right")
        x = self.ginv(p)
        loc = self.base.locate(x, depth)
        if loc.kind in ("left", "right"):
            # p within solver tolerance of a hull endpoint
            x = self.base.hull.lo if loc.kind == "left" else self.base.hull.hi
            loc = self.base.locate(x, depth)
        return Location(loc.kind, self.map_interval(loc.interval), loc.level)

    def iter_gaps_by_size(self, max_level: int | None = None):
        for gap in self.base.iter_gaps_by_size(max_level):
            yield type(gap)(self.map_interval(gap.interval), True, gap.level)

    def cell_width(self, depth: int | None = None) -> float:
        gp = self.box.gprime[1] if self.box.gprime else 1.0
        return float(self.base.cell_width(depth)) * gp

    @property
    def is_self_similar(self) -> bool:
        return self.base.is_self_similar

    def with_depth(self, depth: int) -> "LazyImage":
        return LazyImage(self.fam, self.box, self.c, self.a, self.base.with_depth(depth), self.tol)

    def deepen(self, k: int = 2) -> "LazyImage":
        return self.with_depth(self.base.depth + k)


@dataclass
class ImageResult:
    image: CantorApprox
    slack: float  # total length lost to merging overlapping rounded intervals
    merged: int = 0
    pointwise: list = field(default_factory=list)


def image(fam: TransferFamily, box: SolverBox, c, a, K: CantorApprox, tol: float = 1e-12,
          report: bool = False):
    """Materialised cover of g_{c,α}(K), outward-rounded by ``tol``."""
    lazy = LazyImage(fam, box, c, a, K, tol * 0.5)
    ivs = []
    for iv in K.intervals:
        m = lazy.map_interval(iv)
        ivs.append(Interval(m.lo - tol, m.hi + tol))
    merged = merge_intervals(ivs)
    slack = sum(iv.length for iv in ivs) - sum(iv.length for iv in merged)
    out = CantorApprox(merged, depth=K.depth, source="image", allow_degenerate=True)
    if report:
        return ImageResult(out, float(slack), len(ivs) - len(merged))
    return out
