import math
from fractions import Fraction

import numpy as np
import pytest

from fracton.exceptions import BoseDivergenceError, DomainError, OccupationDivergenceError
from fracton.models import StatisticalPoint
from fracton.services import solver

XI_GRID = np.geomspace(1e-3, 1e3, 100)
GENERIC_H = [1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9]


def test_semion_at_unit_fugacity():
    point = solver.solve_Y(Fraction(3, 2), 1.0)
    assert point.Y == pytest.approx((3 + math.sqrt(5)) / 2, rel=1e-14)
    assert point.n == pytest.approx(2 / math.sqrt(5), rel=1e-14)
    assert point.method == "closed-form"


def test_fermion_and_boson_points():
    assert solver.solve_Y(1, 1.0).n == pytest.approx(0.5)
    assert solver.solve_Y(2, 2.0).n == pytest.approx(1.0)


def test_derived_fields_are_consistent():
    point = solver.solve_Y(1.37, 0.8)
    assert point.Y > 2
    assert point.p + point.q == pytest.approx(1.0, abs=1e-15)
    assert point.theta == point.q
    assert point.n == pytest.approx(1 / (point.Y - point.h), rel=1e-12)
    assert point.n == pytest.approx(point.p / (point.q + (2 - point.h) * point.p), rel=1e-12)
    lhs = (point.h - 1) * math.log(point.Y - 1) + (2 - point.h) * math.log(point.Y - 2)
    assert lhs == pytest.approx(math.log(0.8), abs=1e-12)


@pytest.mark.parametrize("h", [1.0, 1.5, 2.0])
def test_root_finder_matches_closed_forms(h):
    xis = XI_GRID[XI_GRID > 1.0] if h == 2.0 else XI_GRID
    for xi in xis:
        exact = solver.solve_Y(h, float(xi))
        generic = solver.solve_Y(h, float(xi), closed_form=False)
        assert generic.method == "bisection-newton"
        assert generic.converged
        assert generic.n == pytest.approx(exact.n, rel=1e-10), f"xi={xi}"


def test_semion_closed_form_distribution():
    for xi in XI_GRID:
        point = solver.solve_Y(1.5, float(xi), closed_form=False)
        assert point.n == pytest.approx(solver.semion_occupation(float(xi)), rel=1e-10)


@pytest.mark.parametrize("h", GENERIC_H)
def test_partition_identity_holds_on_grid(h):
    for xi in XI_GRID:
        point = solver.solve_Y(h, float(xi))
        assert solver.partition_identity_defect(point) <= 1e-10, f"h={h} xi={xi}"


@pytest.mark.parametrize("h, xi", [(1.5, 1.0), (1, 5.0), (1.7, 0.01)])
def test_partition_identity_examples(h, xi):
    assert solver.partition_identity_defect(solver.solve_Y(h, xi)) <= 1e-10


def test_loose_tolerance_breaks_the_partition_identity():
    defects = [
        solver.partition_identity_defect(solver.solve_Y(h, float(xi), tolerance=1e-2))
        for h in GENERIC_H for xi in XI_GRID
    ]
    assert max(defects) > 1e-10


@pytest.mark.parametrize("h", GENERIC_H)
def test_converges_over_wide_range(h):
    for xi in np.geomspace(1e-6, 1e6, 25):
        assert solver.solve_Y(h, float(xi)).converged


def test_tiny_fugacity_keeps_offset_precision():
    point = solver.solve_Y(1.9, 1e-5)
    # Y - 2 ~ xi^10 is far below the resolution of Y
    assert point.Y == 2.0
    assert 0 < point.offset < 1e-40
    assert solver.partition_identity_defect(point) <= 1e-10


@pytest.mark.parametrize("h, xi", [(1.99, 1e-6), (1.999, 0.01), (1.9999, 0.5)])
def test_underflowing_offset_near_the_boson_boundary(h, xi):
    point = solver.solve_Y(h, xi)
    # t = ln(Y - 2) is far below ln of the smallest double
    assert point.log_offset < -745
    assert point.offset == 0.0
    assert point.converged
    assert point.n == pytest.approx(1 / (2 - h), rel=1e-15)
    assert point.p == 1.0 and point.q == 0.0
    assert solver.partition_identity_defect(point) <= 1e-10


def test_occupation_on_the_cap_from_reduced_energy():
    point = StatisticalPoint(epsilon=-20.0, mu=0.0, kT=1.0)
    assert solver.occupation(1.99, point) == pytest.approx(100.0, rel=1e-12)


@pytest.mark.parametrize("xi", [1e-200, 1e-3, 1.0, 1e3, 1e300])
def test_semion_closed_form_matches_the_root_finder(xi):
    exact = solver.solve_Y(1.5, xi)
    numeric = solver.solve_Y(1.5, xi, closed_form=False)
    assert exact.method == "closed-form"
    assert exact.log_offset == pytest.approx(numeric.log_offset, rel=1e-10, abs=1e-10)
    assert exact.n == pytest.approx(numeric.n, rel=1e-10)


def test_occupation_decreases_in_xi_and_increases_in_h():
    xis = np.geomspace(0.1, 1e3, 30)
    table = np.array([[solver.solve_Y(h, float(xi)).n for xi in xis] for h in [1.0] + GENERIC_H])
    assert np.all(np.diff(table, axis=1) < 0)
    assert np.all(np.diff(table, axis=0) > 0)


@pytest.mark.parametrize("h, limit", [(Fraction(3, 2), 2.0), (Fraction(4, 3), 1.5), (Fraction(5, 3), 3.0)])
def test_lowest_landau_level_limit(h, limit):
    assert solver.solve_Y(h, 1e-9).n == pytest.approx(limit, rel=1e-6)
    assert solver.lll_limit(h) == pytest.approx(limit)


def test_lll_limit_is_infinite_for_bosons():
    assert solver.lll_limit(2) == math.inf


def test_occupation_from_statistical_point():
    point = StatisticalPoint(epsilon=1.0, mu=0.0, kT=1.0)
    assert solver.occupation(1, point) == pytest.approx(1 / (math.e + 1), rel=1e-12)
    assert solver.occupation(1.5, StatisticalPoint(epsilon=0.0, mu=0.0, kT=2.0)) == pytest.approx(2 / math.sqrt(5))


def test_occupation_survives_large_reduced_energies():
    n = solver.occupation(1.3, StatisticalPoint(epsilon=700.0, mu=0.0, kT=1.0))
    assert 0 < n < 1e-300


@pytest.mark.parametrize("xi", [0.5, 1.0])
def test_bose_divergence(xi):
    with pytest.raises(BoseDivergenceError):
        solver.solve_Y(2, xi)


@pytest.mark.parametrize("xi", [0.0, -1.0, math.inf, math.nan])
def test_invalid_fugacity(xi):
    with pytest.raises(DomainError):
        solver.solve_Y(1.5, xi)


def test_invalid_class():
    with pytest.raises(DomainError):
        solver.solve_Y(2.5, 1.0)


def test_step_distribution():
    assert solver.step_distribution(Fraction(5, 3), 0.0, 1.0) == pytest.approx(3.0)
    assert solver.step_distribution(1, 0.0, 1.0) == 1.0
    assert solver.step_distribution(Fraction(3, 2), 2.0, 1.0) == 0.0
    assert solver.step_distribution(Fraction(3, 2), 1.0, 1.0) == 2.0
    with pytest.raises(OccupationDivergenceError):
        solver.step_distribution(2, 0.0, 1.0)


def test_reference_distributions():
    assert solver.fermi_dirac(1.0) == 0.5
    assert solver.bose_einstein(2.0) == 1.0
    assert solver.semion_occupation(0.0) == 2.0
    with pytest.raises(BoseDivergenceError):
        solver.bose_einstein(1.0)


def test_sweep_keeps_grid_order_and_failures():
    results = solver.sweep(2, np.array([0.5, 2.0, 3.0]))
    assert isinstance(results[0], BoseDivergenceError)
    assert [r.n for r in results[1:]] == pytest.approx([1.0, 0.5])


def test_sweep_over_reduced_energy():
    results = solver.sweep(1, np.array([0.0, 1.0, 800.0]), log_xi=True)
    assert results[0].n == 0.5
    assert results[1].n == pytest.approx(1 / (math.e + 1), rel=1e-12)
    assert isinstance(results[2], DomainError)


def test_reduced_energy_beyond_float_range():
    with pytest.raises(DomainError):
        solver.solve_log(1.3, 800.0)
