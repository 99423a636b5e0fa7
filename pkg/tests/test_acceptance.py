"""The ten acceptance criteria, one test (or group) each.

A summary with one PASS/FAIL line per criterion is printed at the end of
the pytest run.
"""

import json
import math
import random
import time
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from cantorsum.cantor import CantorApprox, build_self_similar
from cantorsum.certify import Certificate
from cantorsum.cli import EXIT_PRECONDITION, run
from cantorsum.counterexamples import giant_excludes, giant_raster, rational_grid
from cantorsum.errors import PreconditionError
from cantorsum.gaplemma import newhouse_intersect
from cantorsum.oracle import validate
from cantorsum.thickness import _canonical_thickness, self_similar_thickness, thickness
from cantorsum.transfer import solve_g

from families import boxes
from oracles import cover_np, overlap_pieces_np, random_cover

GAMMAS = [Fraction(1, 3), Fraction(7, 20), Fraction(2, 5), Fraction(9, 20)]
EPSILONS = [Fraction(1, 100), Fraction(1, 10), Fraction(3, 10)]


def acceptance(n, title):
    return pytest.mark.acceptance(n, title)


@acceptance(1, "thickness formula gamma/(1-2 gamma)")
@pytest.mark.parametrize("gamma", GAMMAS)
def test_01_thickness_formula(gamma):
    _canonical_thickness.cache_clear()
    for depth in (2, 6, 10, 14):
        t0 = time.perf_counter()
        tau = thickness(build_self_similar(gamma, depth)).tau
        assert time.perf_counter() - t0 < 1.0
        assert abs(float(tau) - float(gamma / (1 - 2 * gamma))) <= 1e-12


@acceptance(2, "epsilon-thickness sandwich (1-eps)^2 <= tau_eps/tau <= 1")
def test_02_sandwich():
    rnd = random.Random(2)
    sets = []
    while len(sets) < 100:
        ivs = random_cover(rnd, n_max=40)
        if len(ivs) >= 2:
            sets.append(CantorApprox.explicit(ivs))
    sets += [build_self_similar(g, 10) for g in GAMMAS]
    violations = []
    for K in sets:
        tau = thickness(K).tau
        for eps in EPSILONS:
            r = thickness(K, eps).tau / tau
            if not (1 - eps) ** 2 <= r <= 1:
                violations.append((K, eps, r))
    assert violations == []


@acceptance(3, "transfer-map derivative and eta bounds")
@pytest.mark.parametrize("fam,box", boxes(), ids=lambda v: getattr(v, "id", ""))
def test_03_transfer_derivative(fam, box):
    rng = random.Random(3)
    h = 1e-6
    for _ in range(1000):
        c = box.c0 + rng.uniform(-0.95, 0.95) * box.delta1
        a = box.alpha0 + rng.uniform(-0.95, 0.95) * box.a_rad
        x = box.u1 + rng.uniform(-0.95, 0.95) * box.delta1 * 0.99
        y = solve_g(fam, box, c, a, x, tol=1e-15)
        fd = (solve_g(fam, box, c, a, x + h, tol=1e-15, check=False)
              - solve_g(fam, box, c, a, x - h, tol=1e-15, check=False)) / (2 * h)
        exact = fam.g_prime(a, x, y)
        assert abs(fd - exact) <= 1e-6 * max(abs(exact), 1e-3)
        assert box.eta ** 2 <= abs(fd) <= 1 / box.eta ** 2


@acceptance(4, "sum-mt certificate, depth-14 validation, shifted box fails")
def test_04_sum_middle_third(tmp_path):
    t0 = time.perf_counter()
    out = tmp_path / "cert.json"
    assert run(["certify", "sum-mt", "--out", str(out)]) == 0
    cert = Certificate.from_json(out.read_text())
    (i0, i1), (j0, j1) = cert.alpha_interval, cert.value_interval
    assert i0 < i1 and j0 < j1
    rep = validate(cert, 14)
    assert rep.rho == pytest.approx(3 * 3.0 ** -14)
    assert rep.fraction == 1.0
    moved = replace(cert, alpha_interval=[i0 + 0.1, i1 + 0.1])
    bad = validate(moved, 14)
    assert not bad.passed and bad.max_miss > bad.rho
    assert time.perf_counter() - t0 < 300


@acceptance(5, "pinned middle-third value intervals at depth 16")
@pytest.mark.parametrize("t", ["0,0", "1/3,1/3"])
def test_05_pinned_middle_third(tmp_path, t):
    out = tmp_path / "cert.json"
    assert run(["certify", "pinned-mt", "--t", t, "--out", str(out)]) == 0
    cert = Certificate.from_json(out.read_text())
    v0, v1 = cert.value_interval
    assert v0 < v1
    rep = validate(cert, 16)
    assert rep.rho == pytest.approx(math.sqrt(2) * 3.0 ** -16 + 1e-12)
    assert rep.passed and rep.fraction == 1.0
    assert rep.n_points >= int((v1 - v0) / 1e-3) + 1


@acceptance(6, "thickness certificate for C(0.4) + S^1; gamma 1/3 rejected")
def test_06_thickness_circle(tmp_path):
    out = tmp_path / "cert.json"
    assert run(["certify", "thickness", "--gamma", "0.4", "--family", "circle-sum",
                "--depth", "12", "--out", str(out)]) == 0
    cert = Certificate.from_json(out.read_text())
    assert cert.constants["tau_1"] * cert.constants["tau_2"] == 4
    assert validate(cert, 12).passed
    assert run(["certify", "thickness", "--gamma", "1/3", "--family", "circle-sum",
                "--out", str(tmp_path / "x.json")]) == EXIT_PRECONDITION


@acceptance(7, "pinned p-norm: one value interval for beta 1.95, 2, 2.05")
def test_07_pinned_pnorm(pnorm_cert):
    lo, hi = pnorm_cert.alpha_interval
    betas = [1.95, 2.0, 2.05]
    assert all(lo <= b <= hi for b in betas)
    rep = validate(pnorm_cert, 12, betas=betas)
    assert rep.passed
    assert set(rep.details["per_beta_max_miss"]) == {str(b) for b in betas}
    assert all(m <= rep.rho for m in rep.details["per_beta_max_miss"].values())


@acceptance(8, "annulus certificate and raster validation at cell 2^-10")
def test_08_annulus(tmp_path, capsys):
    out = tmp_path / "annulus.json"
    assert run(["demo-annulus", "--a", "[-0.1,0.1]", "--b", "[-0.1,0.1]",
                "--out", str(out)]) == 0
    cert = Certificate.from_json(out.read_text())
    k = cert.constants
    two_e0 = k["delta"] ** 2 * (1 - 7 * k["epsilon"])
    assert two_e0 > 0
    assert min(k["pole_width_min"].values()) >= two_e0
    rep = validate(cert, cell=2.0 ** -10)
    assert rep.passed and rep.details["cell"] == 2.0 ** -10


@acceptance(9, "Giant exclusion for random rationals; truncated rasters")
def test_09_giant():
    rng = random.Random(9)
    for _ in range(1000):
        q = tuple(Fraction(rng.randint(-10 ** 7, 10 ** 7), rng.randint(1, 10 ** 6))
                  for _ in range(2))
        assert giant_excludes(q).excluded
    for N in (4, 8, 16):
        grid = giant_raster(N, cell=Fraction(1, 48))
        pts = [p for p in rational_grid(N) if (48 * p[0]).denominator == 1
               and (48 * p[1]).denominator == 1]
        assert pts
        assert not any(grid.occupied((float(x), float(y))) for x, y in pts)


@acceptance(10, "gap lemma agrees with depth-14 brute force (100 cases)")
def test_10_gap_lemma_vs_brute_force():
    rng = random.Random(10)
    tol = 1e-6
    agree = n = 0
    while n < 100:
        g1 = Fraction(rng.randint(25, 48), 100)
        g2 = Fraction(rng.randint(25, 48), 100)
        if self_similar_thickness(g1) * self_similar_thickness(g2) <= 1:
            continue
        s = Fraction(rng.randint(-950, 950), 1000)
        n += 1
        pieces = overlap_pieces_np(cover_np(g1, 14), cover_np(g2, 14, s))
        try:
            w = newhouse_intersect(CantorApprox.self_similar(g1, 14),
                                   CantorApprox.self_similar(g2, 14, offset=s), tol=tol)
        except PreconditionError:
            agree += not pieces
            continue
        lo, hi = float(w.interval.lo), float(w.interval.hi)
        agree += any(p[0] - tol <= hi and lo <= p[1] + tol for p in pieces)
    assert agree == 100
