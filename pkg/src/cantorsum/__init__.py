"""Sums and pinned distance sets of Cantor sets: thickness, gap pairs,
transfer maps, interior certificates and brute-force oracles."""

from .cantor import CantorApprox, build_self_similar, gaps, membership, restrict
from .certify import (Certificate, certify_annulus, certify_pinned_middle_third,
                      certify_pinned_pnorm, certify_sum_circle_middle_third,
                      certify_measure, certify_thickness)
from .errors import PreconditionError
from .gaplemma import newhouse_intersect
from .intervals import Enclosure, Interval, IntervalUnion
from .oracle import validate
from .thickness import bridge, local_thickness, thickness
from .transfer import CircleSum, GeneralizedProduct, PNormDistance, flat_sum_family

__version__ = "0.1.0"

__all__ = [
    "CantorApprox", "Certificate", "CircleSum", "Enclosure", "GeneralizedProduct", "Interval",
    "IntervalUnion", "PNormDistance", "PreconditionError", "bridge", "build_self_similar",
    "certify_annulus", "certify_pinned_middle_third", "certify_pinned_pnorm",
    "certify_sum_circle_middle_third", "certify_measure", "certify_thickness",
    "flat_sum_family", "gaps", "local_thickness", "membership", "newhouse_intersect",
    "restrict", "thickness", "validate",
]
