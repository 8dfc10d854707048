"""
Farey structure of quantum Hall filling factors.

Transitions nu1 = p1/q1 -> nu2 = p2/q2 are allowed when |p2 q1 - p1 q2| = 1.
Integer arithmetic only.
"""
import logging
import math
from fractions import Fraction
from itertools import combinations
from typing import Iterable, List

from fracton.algebra.classes import NuLike, nu_value, class_from_nu, class_members, dual_in_band
from fracton.exceptions import DomainError, OccupationDivergenceError
from fracton.models import DualPair, FillingFactor, FractonClass, OccupationRow, TransitionGraph

logger = logging.getLogger(__name__)


def transition_allowed(nu1: FillingFactor, nu2: FillingFactor) -> bool:
    """Unimodularity |p2 q1 - p1 q2| = 1"""
    return abs(nu2.numerator * nu1.denominator - nu1.numerator * nu2.denominator) == 1


def band_vertices(max_denominator: int, band: int) -> List[FillingFactor]:
    """Reduced rationals inside the open band (band, band + 1), denominator <= max_denominator"""
    if max_denominator < 1:
        raise DomainError(f"max_denominator must be >= 1, got {max_denominator}")
    if band < 0:
        raise DomainError(f"band must be >= 0, got {band}")

    vertices = []
    for q in range(2, max_denominator + 1):
        for p in range(band * q + 1, (band + 1) * q):
            if math.gcd(p, q) == 1:
                vertices.append(FillingFactor(numerator=p, denominator=q))
    return sorted(vertices, key=lambda nu: nu.value)


def farey_graph(max_denominator: int, band: int = 0) -> TransitionGraph:
    """Transition graph over the band: every vertex pair passing transition_allowed"""
    vertices = band_vertices(max_denominator, band)
    edges = [(a, b) for a, b in combinations(vertices, 2) if transition_allowed(a, b)]
    class_labels = {str(nu): class_from_nu(nu) for nu in vertices}

    logger.info(
        f"Farey graph for band ({band}, {band + 1}), max denominator {max_denominator}: "
        f"{len(vertices)} vertices, {len(edges)} edges"
    )
    return TransitionGraph(
        band=band,
        max_denominator=max_denominator,
        vertices=vertices,
        edges=edges,
        class_labels=class_labels,
    )


def farey_sequence(order: int) -> List[Fraction]:
    """Farey sequence F_order on [0, 1] via the next-term recurrence"""
    if order < 1:
        raise DomainError(f"Farey order must be >= 1, got {order}")
    a, b, c, d = 0, 1, 1, order
    terms = [Fraction(a, b)]
    while c <= order:
        k = (order + b) // d
        a, b, c, d = c, d, k * c - a, k * d - b
        terms.append(Fraction(a, b))
    return terms


def lll_occupation(nu: NuLike) -> Fraction:
    """Lowest-Landau-level occupation n(nu) = 1/(2 - h)

    n = 1/nu on (0, 1), 1/(2 - nu) on (1, 2), 1/(nu - 2) on (2, 3), repeating
    with period 2; even integers are poles.
    """
    value = nu_value(nu)
    r = value % 2
    if r == 0:
        raise OccupationDivergenceError(f"occupation diverges at even filling factor {value}")
    return 1 / r if r <= 1 else 1 / (2 - r)


def class_occupation_table(classes: Iterable[FractonClass], bands: int) -> List[OccupationRow]:
    """(h, nu, n) rows for each class and band; n is constant within a class"""
    rows = []
    for fracton_class in classes:
        if fracton_class.is_boundary:
            raise DomainError(f"occupation table needs 1 < h < 2, got h={fracton_class.h}")
        expected = 1 / (2 - fracton_class.h)
        for nu in class_members(fracton_class, bands):
            n = lll_occupation(nu)
            if n != expected:
                raise ArithmeticError(f"n({nu}) = {n} disagrees with 1/(2 - h) = {expected}")
            rows.append(OccupationRow(h=fracton_class, nu=nu, n=n))
    return rows


def graph_occupation_table(graph: TransitionGraph) -> List[OccupationRow]:
    """(h, nu, n) row for every vertex of a transition graph"""
    return [
        OccupationRow(h=graph.class_of(nu), nu=nu, n=lll_occupation(nu))
        for nu in graph.vertices
    ]


def dual_pairs(graph: TransitionGraph) -> List[DualPair]:
    """Each vertex with its in-band dual partner and both class labels"""
    pairs = []
    for nu in graph.vertices:
        dual = dual_in_band(nu)
        pairs.append(DualPair(nu=nu, dual=dual, h=graph.class_of(nu), dual_h=class_from_nu(dual)))
    return pairs
