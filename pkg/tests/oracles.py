"""Independent brute-force references used by the tests.

Nothing here imports the package: covers, gaps, bridges and intersections
are recomputed from scratch with Fractions and plain loops.
"""

from fractions import Fraction
import math


def cover(gamma, depth):
    """Depth-n cover of C_gamma as (lo, hi) Fraction pairs, by recursion."""
    g = Fraction(gamma)
    ivs = [(Fraction(0), Fraction(1))]
    for _ in range(depth):
        nxt = []
        for a, b in ivs:
            L = b - a
            nxt.append((a, a + g * L))
            nxt.append((b - g * L, b))
        ivs = nxt
    return ivs


def gaps_of(ivs):
    return [(a[1], b[0]) for a, b in zip(ivs, ivs[1:]) if b[0] > a[1]]


def bridge_len(ivs, i, side, eps=0):
    """Walk away from gap i until a gap of length >= (1-eps)|G_i|."""
    gs = gaps_of(ivs)
    G = gs[i]
    need = (1 - Fraction(eps)) * (G[1] - G[0])
    if side == "right":
        for H in gs[i + 1:]:
            if H[1] - H[0] >= need:
                return H[0] - G[1]
        return ivs[-1][1] - G[1]
    for H in reversed(gs[:i]):
        if H[1] - H[0] >= need:
            return G[0] - H[1]
    return G[0] - ivs[0][0]


def thickness_of(ivs, eps=0):
    gs = gaps_of(ivs)
    best = None
    for i, G in enumerate(gs):
        for side in ("left", "right"):
            t = bridge_len(ivs, i, side, eps) / (G[1] - G[0])
            best = t if best is None else min(best, t)
    return best


def random_cover(rng, n_max=30, den=997):
    """Random disjoint non-degenerate intervals in [0, 1] with rational ends."""
    n = rng.randint(2, n_max)
    pts = sorted(set(Fraction(rng.randint(0, den), den) for _ in range(4 * n)))
    if len(pts) % 2:
        pts = pts[:-1]
    ivs = [(pts[k], pts[k + 1]) for k in range(0, len(pts), 2)]
    # leave a real gap between consecutive intervals
    return [iv for j, iv in enumerate(ivs) if j == 0 or iv[0] > ivs[j - 1][1]]


def overlaps(A, B):
    """All nonempty pairwise intersections, O(|A||B|)."""
    out = []
    for a in A:
        for b in B:
            lo, hi = max(a[0], b[0]), min(a[1], b[1])
            if lo <= hi:
                out.append((lo, hi))
    return out


def sweep_overlaps(A, B):
    """Same as `overlaps` for sorted disjoint lists, by a merge sweep."""
    i = j = 0
    out = []
    while i < len(A) and j < len(B):
        lo, hi = max(A[i][0], B[j][0]), min(A[i][1], B[j][1])
        if lo <= hi:
            out.append((lo, hi))
        if A[i][1] < B[j][1]:
            i += 1
        else:
            j += 1
    return out


def distance_to_union(x, ivs):
    return min(0 if a <= x <= b else min(abs(x - a), abs(x - b)) for a, b in ivs)


def circle_sum_y(c, a, x):
    return c - math.sqrt(1 - (a - x) ** 2)


def middle_third_digits_in(x, depth=40):
    """x in C_{1/3} decided by the ternary expansion (Fraction input)."""
    x = Fraction(x)
    if x < 0 or x > 1:
        return False
    for _ in range(depth):
        x *= 3
        d = math.floor(x)
        if d == 1 and x != 1:
            return False
        if x == 1 or x == 3:
            return True
        x -= d
    return True


def cover_np(gamma, depth, offset=0.0):
    """Float (lo, hi) arrays of the depth-n cover, built by doubling."""
    import numpy as np
    g = float(gamma)
    lefts, L = np.zeros(1), 1.0
    for _ in range(depth):
        lefts = np.concatenate([lefts, lefts + (1 - g) * L])
        L *= g
    lefts = np.sort(lefts) + float(offset)
    return lefts, lefts + L


def overlap_pieces_np(A, B):
    """Pairwise intersections of two sorted disjoint float covers."""
    import numpy as np
    alo, ahi = A
    blo, bhi = B
    # first B interval ending at or after each A interval starts
    j0 = np.searchsorted(bhi, alo, side="left")
    out = []
    for i in np.nonzero(j0 < len(blo))[0]:
        j = j0[i]
        while j < len(blo) and blo[j] <= ahi[i]:
            out.append((max(alo[i], blo[j]), min(ahi[i], bhi[j])))
            j += 1
    return out
