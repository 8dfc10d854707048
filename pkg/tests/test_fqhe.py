from fractions import Fraction
from itertools import combinations

import pytest

from fracton.algebra.classes import class_from_nu
from fracton.algebra.fqhe import (
    band_vertices,
    class_occupation_table,
    dual_pairs,
    farey_graph,
    farey_sequence,
    graph_occupation_table,
    lll_occupation,
    transition_allowed,
)
from fracton.exceptions import DomainError, OccupationDivergenceError
from fracton.models import FillingFactor, FractonClass


def nu(text: str) -> FillingFactor:
    return FillingFactor.of(text)


@pytest.mark.parametrize("a, b, allowed", [
    ("1/3", "2/5", True),
    ("1/3", "2/3", False),
    ("1/2", "1/2", False),
    ("1/2", "2/3", True),
    ("4/3", "3/2", True),
])
def test_transition_allowed(a, b, allowed):
    assert transition_allowed(nu(a), nu(b)) is allowed
    assert transition_allowed(nu(b), nu(a)) is allowed


def test_farey_graph_denominator_three():
    graph = farey_graph(3)
    assert [str(v) for v in graph.vertices] == ["1/3", "1/2", "2/3"]
    assert {(str(a), str(b)) for a, b in graph.edges} == {("1/3", "1/2"), ("1/2", "2/3")}
    assert graph.class_of(nu("1/3")).h == Fraction(5, 3)


def test_farey_graph_denominator_one_is_empty():
    graph = farey_graph(1)
    assert graph.vertices == []
    assert graph.edges == []


@pytest.mark.parametrize("max_denominator", range(2, 9))
def test_edges_match_brute_force(max_denominator):
    graph = farey_graph(max_denominator)
    vertices = sorted({Fraction(p, q) for q in range(2, max_denominator + 1) for p in range(1, q)})
    expected = {
        (a, b) for a, b in combinations(vertices, 2)
        if abs(b.numerator * a.denominator - a.numerator * b.denominator) == 1
    }
    assert [v.value for v in graph.vertices] == vertices
    assert {(a.value, b.value) for a, b in graph.edges} == expected


@pytest.mark.parametrize("band", [1, 2, 3])
def test_higher_bands_stay_inside_the_band(band):
    graph = farey_graph(6, band)
    assert graph.vertices
    assert all(band < v.value < band + 1 for v in graph.vertices)
    for a, b in graph.edges:
        assert abs(b.numerator * a.denominator - a.numerator * b.denominator) == 1


def test_band_vertices_validation():
    with pytest.raises(DomainError):
        band_vertices(0, 0)
    with pytest.raises(DomainError):
        band_vertices(3, -1)


@pytest.mark.parametrize("order", range(2, 10))
def test_farey_neighbours_are_connected(order):
    graph = farey_graph(order)
    edges = {frozenset((a.value, b.value)) for a, b in graph.edges}
    interior = farey_sequence(order)[1:-1]
    for a, b in zip(interior, interior[1:]):
        assert frozenset((a, b)) in edges, f"{a} and {b} are not connected"


def test_farey_sequence():
    assert farey_sequence(1) == [Fraction(0), Fraction(1)]
    assert [str(f) for f in farey_sequence(5)] == [
        "0", "1/5", "1/4", "1/3", "2/5", "1/2", "3/5", "2/3", "3/4", "4/5", "1",
    ]
    with pytest.raises(DomainError):
        farey_sequence(0)


@pytest.mark.parametrize("filling, n", [
    ("2/3", "3/2"), ("4/3", "3/2"), ("8/3", "3/2"),
    ("1/2", "2"), ("3/2", "2"), ("5/2", "2"),
    ("1/3", "3"), ("5/3", "3"), ("7/3", "3"),
])
def test_lll_occupation_pairs(filling, n):
    assert lll_occupation(nu(filling)) == Fraction(n)


def test_lll_occupation_matches_class_in_every_band():
    for band in range(4):
        for filling in band_vertices(12, band):
            assert lll_occupation(filling) == 1 / (2 - class_from_nu(filling).h), str(filling)


def test_lll_occupation_at_integers():
    assert lll_occupation(1) == 1
    assert lll_occupation(3) == 1
    with pytest.raises(OccupationDivergenceError):
        lll_occupation(2)


def test_class_occupation_table():
    rows = class_occupation_table([FractonClass(h="3/2"), FractonClass(h="4/3")], 3)
    assert [(str(r.h), str(r.nu), r.n) for r in rows] == [
        ("3/2", "1/2", 2), ("3/2", "3/2", 2), ("3/2", "5/2", 2),
        ("4/3", "2/3", Fraction(3, 2)), ("4/3", "4/3", Fraction(3, 2)), ("4/3", "8/3", Fraction(3, 2)),
    ]


def test_class_occupation_table_rejects_boundary_classes():
    with pytest.raises(DomainError):
        class_occupation_table([FractonClass(h=1)], 2)


def test_graph_occupation_table_and_dual_pairs():
    graph = farey_graph(3)
    table = graph_occupation_table(graph)
    assert [(str(r.nu), r.n) for r in table] == [("1/3", 3), ("1/2", 2), ("2/3", Fraction(3, 2))]

    pairs = {str(p.nu): p for p in dual_pairs(graph)}
    assert str(pairs["2/3"].dual) == "1/3"
    assert (str(pairs["2/3"].h), str(pairs["2/3"].dual_h)) == ("4/3", "5/3")


@pytest.mark.parametrize("band", [0, 1, 2])
def test_dual_pairs_appear_jointly(band):
    graph = farey_graph(10, band)
    vertices = set(graph.vertices)
    for pair in dual_pairs(graph):
        assert pair.dual in vertices
        assert pair.h.h + pair.dual_h.h == 3
