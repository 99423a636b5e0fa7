from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cantorsum.cantor import CantorApprox, build_self_similar, membership, restrict
from cantorsum.errors import EmptyIntersectionError, PreconditionError
from cantorsum.intervals import Interval

from oracles import cover, gaps_of, middle_third_digits_in

# gamma = k/200 in [0.1, 0.495]
gammas = st.integers(min_value=20, max_value=99).map(lambda k: Fraction(k, 200))


def as_pairs(K):
    return [(iv.lo, iv.hi) for iv in K.intervals]


def test_depth_one_middle_third():
    K = build_self_similar("1/3", 1)
    assert as_pairs(K) == [(0, Fraction(1, 3)), (Fraction(2, 3), 1)]


def test_depth_zero_is_unit_interval():
    assert as_pairs(build_self_similar("1/3", 0)) == [(0, 1)]


def test_gamma_04_depth_two():
    K = build_self_similar("0.4", 2)
    assert len(K) == 4
    assert {iv.length for iv in K.intervals} == {Fraction(4, 25)}
    assert sorted(g.length for g in K.bounded_gaps()) == [Fraction(2, 25), Fraction(2, 25),
                                                          Fraction(1, 5)]
    assert [(g.lo, g.hi) for g in K.bounded_gaps()] == [
        (Fraction(4, 25), Fraction(6, 25)), (Fraction(2, 5), Fraction(3, 5)),
        (Fraction(19, 25), Fraction(21, 25))]


def test_gaps_include_unbounded_components():
    gs = build_self_similar("1/3", 1).gaps()
    assert [g.bounded for g in gs] == [False, True, False]
    assert gs[1].interval == Interval(Fraction(1, 3), Fraction(2, 3))


def test_single_interval_has_no_bounded_gaps():
    assert CantorApprox.explicit([(0, 1)]).bounded_gaps() == []


@pytest.mark.parametrize("gamma", [Fraction(1, 3), Fraction(2, 5), Fraction(9, 20)])
def test_cover_matches_recursive_oracle(gamma):
    assert as_pairs(build_self_similar(gamma, 7)) == cover(gamma, 7)


@given(gammas, st.integers(min_value=0, max_value=6))
def test_cover_invariants(gamma, depth):
    K = build_self_similar(gamma, depth)
    ivs = K.intervals
    assert len(ivs) == 2 ** depth
    assert all(iv.length == gamma ** depth for iv in ivs)
    assert all(a.hi < b.lo for a, b in zip(ivs, ivs[1:]))
    assert [(g.lo, g.hi) for g in K.bounded_gaps()] == gaps_of(cover(gamma, depth))


@given(gammas, st.integers(min_value=1, max_value=8))
def test_covers_are_nested(gamma, depth):
    coarse = build_self_similar(gamma, depth - 1).intervals
    for iv in build_self_similar(gamma, depth).intervals:
        assert any(c.contains_interval(iv) for c in coarse)


def test_invalid_gamma_rejected():
    for g in ("1/2", "0", "3/4"):
        with pytest.raises(PreconditionError):
            build_self_similar(g, 3)


def test_membership_examples():
    assert membership(Fraction(1, 3), "1/3", Fraction(1, 10 ** 9)) == "in"
    assert membership(Fraction(1, 2), "1/3", Fraction(1, 10 ** 9)) == "out"
    assert membership(Fraction(1, 4), "1/3", Fraction(1, 10 ** 9)) == "in"
    # 1/4 also sits in every depth-20 cover interval
    K = build_self_similar("1/3", 20)
    assert K.locate(Fraction(1, 4)).kind == "set"


@given(st.integers(min_value=1, max_value=3 ** 6).flatmap(
    lambda d: st.integers(min_value=0, max_value=d).map(lambda k: Fraction(k, d))))
def test_membership_agrees_with_ternary_digits(x):
    got = membership(x, "1/3", Fraction(1, 3 ** 30))
    assert (got == "in") == middle_third_digits_in(x, 60) or got == "boundary-undecided"


def test_membership_rejects_bad_tol():
    with pytest.raises(ValueError):
        membership(0.5, "1/3", 0)


def test_locate_classifies_points():
    K = build_self_similar("1/3", 3)
    assert K.locate(Fraction(1, 2)).kind == "gap"
    assert K.locate(Fraction(1, 2)).interval == Interval(Fraction(1, 3), Fraction(2, 3))
    assert K.locate(-1).kind == "left" and K.locate(2).kind == "right"
    assert K.locate(0).kind == "set"


def test_iter_gaps_by_size_is_nonincreasing():
    K = build_self_similar("2/5", 5)
    lens = [g.length for g in K.iter_gaps_by_size()]
    assert lens == sorted(lens, reverse=True)
    assert len(lens) == 2 ** 5 - 1


def test_cylinder_is_affine_copy():
    K = build_self_similar("1/3", 6)
    cyl = K.cylinder(Fraction(2, 3), Fraction(1, 9), "right")
    assert cyl.hull == Interval(Fraction(2, 3), Fraction(7, 9))
    with pytest.raises(PreconditionError):
        K.cylinder(Fraction(1, 2), Fraction(1, 9), "right")


def test_translate_and_reflect():
    K = build_self_similar("2/5", 3)
    assert as_pairs(K.translated(Fraction(1, 10)).with_depth(3)) == [
        (a + Fraction(1, 10), b + Fraction(1, 10)) for a, b in as_pairs(K)]
    R = K.reflected()
    assert sorted((-b, -a) for a, b in as_pairs(K)) == as_pairs(R)


def test_restrict():
    K = build_self_similar("1/3", 3)
    R = restrict(K, Interval(Fraction(2, 3), 1))
    assert R.hull == Interval(Fraction(2, 3), 1)
    with pytest.raises(EmptyIntersectionError):
        restrict(K, Interval(Fraction(2, 5), Fraction(3, 5)))


@given(gammas, st.integers(min_value=0, max_value=5))
def test_json_round_trip(gamma, depth):
    K = build_self_similar(gamma, depth)
    assert CantorApprox.from_json(K.to_json()) == K
    E = CantorApprox.explicit(K.intervals, depth=depth)
    assert CantorApprox.from_json(E.to_json()) == E


def test_explicit_rejects_overlaps():
    with pytest.raises(ValueError):
        CantorApprox.explicit([(0, 2), (1, 3)])
