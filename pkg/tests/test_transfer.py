import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cantorsum.cantor import build_self_similar
from cantorsum.errors import BoxRejected, PreconditionError
from cantorsum.intervals import Enclosure
from cantorsum.transfer import (CircleSum, GeneralizedProduct, LazyImage, PNormDistance,
                                SolverBox, certify_box, family_from_dict, flat_sum_family,
                                image, lipschitz_radius, solve_g, solve_x)

from families import boxes
from oracles import circle_sum_y


def test_circle_sum_examples():
    fam = CircleSum()
    box = certify_box(fam, SolverBox(1.0, 0.0, 0.6, 0.2, delta0=0.1, delta1=0.02))
    assert solve_g(fam, box, 1.0, 0.0, 0.6) == pytest.approx(0.2, abs=1e-12)
    assert fam.H(0, 0, 0) == 1


def test_pnorm_example():
    fam = PNormDistance((0, 0), 2.0)
    box = certify_box(fam, SolverBox(1.0, 2.0, 0.6, 0.8, delta0=0.1, delta1=0.02))
    assert solve_g(fam, box, 1.0, 2.0, 0.6) == pytest.approx(0.8, abs=1e-12)
    assert solve_x(fam, box, 1.0, 2.0, 0.8, 0.58, 0.62) == pytest.approx(0.6, abs=1e-12)


def test_box_with_vanishing_hx_rejected():
    fam = CircleSum()
    with pytest.raises(BoxRejected):
        certify_box(fam, SolverBox(1.0, 0.0, 0.0, 0.0, delta0=0.1, delta1=0.05))


def test_pnorm_box_accepted_and_exponent_one_rejected():
    fam = PNormDistance((0, 0), 2.0)
    # β in [1.9, 2.1], with x and y bounded away from the pin
    box = certify_box(fam, SolverBox(1.0, 2.0, 0.6, 0.8, delta0=0.1, delta1=0.01,
                                     alpha_radius=0.1))
    assert box.eta is not None and box.eta > 0
    with pytest.raises(BoxRejected):
        certify_box(fam, SolverBox(1.0, 1.0, 0.6, 0.8, delta0=0.1, delta1=0.02))


def test_lipschitz_radius_formula():
    box = SolverBox(1.0, 0.0, 0.5, 0.5, delta0=1.0, delta1=1.0, eta=1.0)
    assert lipschitz_radius(box, 0.1) == pytest.approx(0.025)
    with pytest.raises(PreconditionError):
        lipschitz_radius(SolverBox(1.0, 0.0, 0.5, 0.5, 1.0, 1.0), 0.1)


def test_flat_family_image_is_translate():
    fam = flat_sum_family()
    K = build_self_similar("1/3", 4)
    box = certify_box(fam, SolverBox(1.5, 0.0, 0.5, 1.0, delta0=2.0, delta1=0.6, alpha_radius=0.1))
    img = image(fam, box, 1.5, 0.0, K, tol=1e-12)
    # y = c - x reverses the order of the intervals
    ends = sorted(round(float(iv.lo), 9) for iv in img.intervals)
    assert ends == sorted(round(1.5 - float(iv.hi), 9) for iv in K.intervals)


def test_family_round_trip():
    for fam in (CircleSum(), PNormDistance((0.1, 0.2), 1.5), GeneralizedProduct((0, 1, 1, 0.5)),
                flat_sum_family()):
        assert family_from_dict(fam.to_dict()).to_dict() == fam.to_dict()


@pytest.mark.parametrize("fam,box", boxes(), ids=lambda v: getattr(v, "id", ""))
def test_finite_difference_derivative(fam, box):
    rng = random.Random(7)
    h = 1e-6
    for _ in range(1000):
        c = box.c0 + rng.uniform(-0.3, 0.3) * box.delta1
        a = box.alpha0 + rng.uniform(-0.3, 0.3) * box.a_rad
        x = box.u1 + rng.uniform(-0.3, 0.3) * box.delta1
        y = solve_g(fam, box, c, a, x, tol=1e-15)
        fd = (solve_g(fam, box, c, a, x + h, tol=1e-15)
              - solve_g(fam, box, c, a, x - h, tol=1e-15)) / (2 * h)
        exact = fam.g_prime(a, x, y)
        assert fd == pytest.approx(exact, rel=1e-6, abs=1e-9)
        assert box.eta ** 2 <= abs(exact) <= 1 / box.eta ** 2


def test_circle_sum_solver_matches_closed_form():
    fam, box = boxes()[0]
    for x in np.linspace(box.x_range.lo, box.x_range.hi, 11):
        assert solve_g(fam, box, box.c0, 0.0, x) == pytest.approx(circle_sum_y(box.c0, 0.0, x), abs=1e-12)


@given(st.floats(min_value=-0.02, max_value=0.02), st.floats(min_value=-0.02, max_value=0.02))
def test_residual_within_tolerance(dx, dc):
    fam, box = boxes()[1]
    y = solve_g(fam, box, box.c0 + dc, 2.0, box.u1 + dx, tol=1e-12)
    assert abs(fam.H(2.0, box.u1 + dx, y) - (box.c0 + dc)) <= 1e-12


def test_interval_partials_enclose_float_partials():
    fam, box = boxes()[1]
    A, X, Y = box.enclosures()
    hx = Enclosure._coerce(fam.H_x(A, X, Y))
    for x in np.linspace(X.lo, X.hi, 5):
        for y in np.linspace(Y.lo, Y.hi, 5):
            assert hx.lo <= fam.H_x(2.0, x, y) <= hx.hi


def test_lazy_image_requires_hull_inside_box():
    fam, box = boxes()[0]
    with pytest.raises(PreconditionError):
        LazyImage(fam, box, box.c0, 0.0, build_self_similar("1/3", 4))
