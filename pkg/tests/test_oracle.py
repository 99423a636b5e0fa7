from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cantorsum.cantor import CantorApprox, build_self_similar
from cantorsum.certify import Certificate
from cantorsum.intervals import IntervalUnion
from cantorsum.oracle import (RasterGrid, RasterTooLarge, cantor_centres, discretise,
                              offset_region, sample_pinned, sample_sumset, shifted,
                              sumset_hits, sumset_miss, validate)

from oracles import cover


def point_set():
    return CantorApprox.explicit([(0, 0)], allow_degenerate=True)


def test_centres_match_cover():
    c = cantor_centres(1 / 3, 5)
    ref = [float((a + b) / 2) for a, b in cover(1 / 3, 5)]
    assert np.allclose(c, ref, atol=1e-15)


def test_degenerate_factors_give_unit_circle():
    z = point_set()
    g = sample_sumset(z, z, 0, window=(-1.5, 1.5), cell=2 ** -5)
    xs, ys = g.xs(), g.ys()
    PX, PY = np.meshgrid(xs, ys)
    r = np.hypot(PX, PY)
    assert g.occupancy[np.abs(r - 1) < 0.25 * g.cell].all()
    assert not g.occupancy[np.abs(r - 1) > 1.5 * g.cell].any()


def test_sumset_hits_exact_for_rectangles():
    A = discretise(IntervalUnion([(0, 0.1)]), 0)
    B = discretise(IntervalUnion([(0, 0.1)]), 0)
    # the point (1.05, 0.05) is within distance 1 of (0.05, 0.05)
    assert sumset_hits([1.05], [0.05], A, B)[0]
    assert not sumset_hits([1.2], [0.05], A, B)[0]
    assert not sumset_hits([0.05], [0.05], A, B)[0]


def test_occupancy_non_increasing_in_depth():
    C = build_self_similar("1/3", 10)
    kw = dict(window=(-1.5, 2.5), cell=2 ** -6)
    occ = [sample_sumset(C, C, d, **kw).occupancy for d in (3, 5, 7)]
    assert not np.any(occ[1] & ~occ[0]) and not np.any(occ[2] & ~occ[1])


def test_determinism_and_tiling():
    C = build_self_similar("2/5", 8)
    kw = dict(window=(-1.5, 2.5), cell=2 ** -6)
    a = sample_sumset(C, C, 6, **kw)
    b = sample_sumset(C, C, 6, **kw)
    c = sample_sumset(C, C, 6, tile_rows=7, **kw)
    assert a == b == c


def test_raster_budget():
    C = build_self_similar("1/3", 14)
    with pytest.raises(RasterTooLarge):
        sample_sumset(C, C, 14)


def test_pgm_round_trip(tmp_path):
    C = build_self_similar("1/3", 6)
    g = sample_sumset(C, C, 4, window=(-1.5, 2.5), cell=2 ** -5)
    p = tmp_path / "s.pgm"
    g.to_pgm(p)
    assert p.read_bytes().startswith(b"P5\n")
    assert np.array_equal(RasterGrid.read_pgm(p), g.occupancy)


def test_pinned_samples_middle_third():
    C = build_self_similar("1/3", 6)
    s = sample_pinned(C, (0, 0), 2.0, 6)
    slack = np.sqrt(2) * 3.0 ** -6
    assert np.min(np.abs(s - 1.0)) <= slack
    assert np.min(np.abs(s - np.sqrt(2))) <= slack


def test_pinned_l1_diameter():
    C = build_self_similar("1/3", 6)
    assert sample_pinned(C, (0, 0), 1.0, 6).max() <= 2


@given(st.floats(min_value=-0.3, max_value=1.3), st.floats(min_value=-0.3, max_value=1.3))
def test_miss_zero_near_sampled_circles(x, y):
    A = discretise(build_self_similar("1/3", 3), 3)
    m = sumset_miss(np.array([x]), np.array([y]), A, A)[0]
    d = np.abs(np.hypot(x - A.centres[:, None], y - A.centres[None, :]) - 1).min()
    assert m == pytest.approx(d, abs=1e-12)


def test_sum_mt_validation_and_controls(sum_mt_cert):
    rep = validate(sum_mt_cert, 14)
    assert rep.passed and rep.fraction == 1.0
    assert rep.rho == pytest.approx(3 * 3.0 ** -14)
    bad = replace(sum_mt_cert, alpha_interval=[a + 0.1 for a in sum_mt_cert.alpha_interval])
    rep_bad = validate(bad, 14)
    assert not rep_bad.passed and rep_bad.max_miss > rep_bad.rho


def test_negative_control_box_in_a_hole(sum_mt_cert):
    # every point of [0,1]^2 + S^1 is at distance >= ~0.29 from (0.5, 0.5)
    hole = replace(sum_mt_cert, alpha_interval=[0.49, 0.51], value_interval=[0.49, 0.51])
    rep = validate(hole, 10)
    assert not rep.passed and rep.max_miss > 0.2


def test_empty_value_interval_is_degenerate_pass(sum_mt_cert):
    rep = validate(replace(sum_mt_cert, value_interval=[1.0, 0.0]))
    assert rep.passed and rep.degenerate


def test_thickness_certificate_validates(thick_cert):
    assert validate(thick_cert, 12).passed


def test_offset_region_segment():
    hat, plus = offset_region([(0, 0), (0, 0.5)])
    assert hat.occupancy.any()


def test_offset_region_single_point_is_empty():
    hat, _ = offset_region([(0, 0)])
    assert not hat.occupancy.any()


def test_offset_region_circle():
    th = np.linspace(0, 2 * np.pi, 65)
    hat, plus = offset_region(np.stack([0.5 * np.cos(th), 0.5 * np.sin(th)], axis=1))
    assert hat.occupancy.any()
    # the centre is at distance exactly 1/2 from every point: not in the region
    assert not hat.occupied((0.0, 0.0))


def test_round_trip_gives_same_verdict(thick_cert):
    again = Certificate.from_json(thick_cert.to_json())
    a, b = validate(thick_cert, 10), validate(again, 10)
    assert a.verdict == b.verdict and a.fraction == b.fraction and a.max_miss == b.max_miss
