import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cantorsum.counterexamples import (Line, PolygonSpec, check_line_identity, g_grid,
                                       giant_excludes, giant_raster, in_polygon_sum,
                                       in_truncated_giant_sum, miss_set, parse_point,
                                       polygon_sum_demo, rational_grid)
from cantorsum.errors import PreconditionError

rationals = st.builds(Fraction, st.integers(min_value=-10 ** 9, max_value=10 ** 9),
                      st.integers(min_value=1, max_value=10 ** 6))


def test_origin_excluded():
    tr = giant_excludes(("0", "0"))
    assert tr.excluded
    assert "S((0, 0), 1)" in str(tr) or "v = (0, 0)" in str(tr)


def test_rational_point_excluded():
    assert giant_excludes((Fraction(1, 2), Fraction(3, 7))).excluded


def test_irrational_input_rejected():
    with pytest.raises(PreconditionError):
        giant_excludes((2 ** 0.5, 0))
    with pytest.raises(PreconditionError):
        parse_point("1/2")


@given(rationals, rationals)
def test_giant_excludes_rationals(x, y):
    tr = giant_excludes((x, y))
    assert tr.excluded and all(s.check for s in tr.steps)


def test_truncated_sum_membership():
    assert not in_truncated_giant_sum((Fraction(1, 3), Fraction(1, 4)), 4)
    assert in_truncated_giant_sum((Fraction(1, 5), 0), 4)


@pytest.mark.parametrize("N", [4, 8, 16])
def test_truncated_raster_misses_rational_grid(N):
    grid = giant_raster(N, cell=Fraction(1, 48))
    pts = [p for p in rational_grid(N) if (p[0] * 48).denominator == 1 and (p[1] * 48).denominator == 1]
    assert pts
    assert not any(grid.occupied((float(x), float(y))) for x, y in pts)
    assert grid.fraction > 0.5


def test_giant_raster_is_deterministic():
    assert giant_raster(4) == giant_raster(4)


def test_square_sides():
    sides = PolygonSpec.unit_square().sides()
    assert len(sides) == 4


def test_line_identity_square():
    assert check_line_identity(PolygonSpec.unit_square(), g_grid(8))


def test_square_demo_reports_untouched_points():
    rep = polygon_sum_demo(PolygonSpec.unit_square(), g_grid(8))
    assert rep.untouched and rep.identity_ok
    assert rep.miss_points
    d = rep.to_dict()
    assert d["n_miss_points"] == len(rep.miss_points)


def test_miss_points_really_missed():
    spec, G = PolygonSpec.unit_square(), g_grid(4)
    for p in miss_set(spec, G):
        assert not in_polygon_sum(p, spec, G)


@given(st.fractions(min_value=-1, max_value=2, max_denominator=40),
       st.fractions(min_value=-1, max_value=2, max_denominator=40))
def test_membership_by_brute_force(x, y):
    spec, G = PolygonSpec.unit_square(), g_grid(4)
    # x is missed iff every translated side lies on a removed line:
    # vertical sides at x - 0, x - 1 and horizontal sides at y - 0, y - 1
    Gs = set(G)
    missed = {x, x - 1} <= Gs and {y, y - 1} <= Gs
    assert in_polygon_sum((x, y), spec, G) == (not missed)


def test_single_segment_misses_whole_lines():
    spec = PolygonSpec([((Fraction(0), Fraction(0)), (Fraction(1), Fraction(0)))])
    rep = polygon_sum_demo(spec, g_grid(4))
    assert rep.untouched and rep.identity_ok
    assert len(rep.miss_lines) == 1


def test_line_arithmetic():
    e = (Fraction(0), Fraction(1))
    assert Line(e, Fraction(1, 2)) + Line(e, Fraction(1, 4)) == Line(e, Fraction(3, 4))
    assert Line(e, 1).contains((5, 1))


def test_spec_round_trip():
    spec = PolygonSpec.unit_square()
    assert PolygonSpec.from_dict(spec.to_dict()).sides() == spec.sides()
