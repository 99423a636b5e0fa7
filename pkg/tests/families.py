"""Certified solver boxes, one per transfer family, shared by tests."""

import math

from cantorsum.transfer import (CircleSum, GeneralizedProduct, PNormDistance, SolverBox,
                                certify_box, flat_sum_family)


def boxes():
    """(family, certified box) for each family under test."""
    out = []
    fam = CircleSum()
    out.append((fam, certify_box(fam, SolverBox(1.2, 0.0, 0.4, 1.2 - math.sqrt(0.84),
                                                delta0=0.15, delta1=0.04))))
    fam = PNormDistance((0.0, 0.0), 2.0)
    out.append((fam, certify_box(fam, SolverBox(1.0, 2.0, 0.6, 0.8, delta0=0.15, delta1=0.03,
                                                alpha_radius=0.05))))
    fam = GeneralizedProduct((0.0, 0.5, 1.0, 0.25))
    out.append((fam, certify_box(fam, SolverBox(fam.H(0.0, 0.4, 0.5), 0.0, 0.4, 0.5,
                                                delta0=0.15, delta1=0.03))))
    fam = flat_sum_family()
    out.append((fam, certify_box(fam, SolverBox(1.0, 0.0, 0.5, 0.5, delta0=0.2, delta1=0.05,
                                                alpha_radius=0.05))))
    return out
