import math

import numpy as np
import pytest
from scipy import special

from fracton.exceptions import DomainError, InfeasibleOccupancyError
from fracton.models import EntropyForms, WeightParams
from fracton.services import entropy, solver


class TestLogWeight:
    def test_fermion_binomial(self):
        assert entropy.log_weight(WeightParams(G=5, N=2, h=1.0)) == pytest.approx(math.log(10))

    def test_boson_negative_binomial(self):
        assert entropy.log_weight(WeightParams(G=5, N=2, h=2.0)) == pytest.approx(math.log(15))

    def test_semion_half_integer_gammas(self):
        # x = 2, y = G + (N - 1)(h - 1) - N = 2.5
        value = entropy.log_weight(WeightParams(G=4, N=2, h=1.5))
        expected = special.gammaln(5.5) - special.gammaln(3) - special.gammaln(3.5)
        assert value == pytest.approx(expected, rel=1e-14)
        # Gamma(5.5) = 945 sqrt(pi) / 32 and Gamma(3.5) = 15 sqrt(pi) / 8
        assert value == pytest.approx(math.log(945 / 32 / (2 * 15 / 8)), rel=1e-14)

    @pytest.mark.parametrize("G", range(1, 31))
    def test_reductions_to_integer_binomials(self, G):
        for N in range(G + 1):
            assert entropy.log_weight(WeightParams(G=G, N=N, h=1.0)) == pytest.approx(
                math.log(math.comb(G, N)), abs=1e-10)
        for N in range(31):
            assert entropy.log_weight(WeightParams(G=G, N=N, h=2.0)) == pytest.approx(
                math.log(math.comb(N + G - 1, N)), abs=1e-10)

    def test_infeasible_occupancy(self):
        with pytest.raises(InfeasibleOccupancyError):
            entropy.log_weight(WeightParams(G=3, N=4, h=1.0))


class TestEntropyForms:
    def test_fermion_half_filling(self):
        assert entropy.entropy_from_n(1, 0.5) == pytest.approx(math.log(2))

    def test_boson_unit_filling(self):
        assert entropy.entropy_from_n(2, 1.0) == pytest.approx(2 * math.log(2))

    def test_vanishes_for_empty_states(self):
        assert entropy.entropy_from_n(1.5, 0.0) == 0.0
        for h in (1.0, 1.25, 1.5, 1.75, 2.0):
            assert 0 <= entropy.entropy_from_n(h, 1e-12) < 1e-9

    def test_rejects_occupation_at_the_cap(self):
        with pytest.raises(DomainError):
            entropy.entropy_from_n(1.5, 2.0)
        with pytest.raises(DomainError):
            entropy.entropy_from_n(1.5, -0.1)

    def test_fermi_point(self):
        point = solver.solve_Y(1, 1.0)
        assert entropy.entropy_from_Y(point) == pytest.approx(math.log(2))

    def test_semion_forms_agree(self):
        forms = entropy.entropy_forms(solver.solve_Y(1.5, 1.0))
        assert forms.spread <= 1e-10
        assert forms.from_Y == pytest.approx(forms.from_n, rel=1e-10)
        assert forms.from_pq == pytest.approx(forms.from_n, rel=1e-10)

    @pytest.mark.parametrize("h", [1.0, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9, 2.0])
    def test_three_forms_agree_on_grid(self, h):
        xis = np.geomspace(1e-3, 1e3, 100)
        if h == 2.0:
            xis = xis[xis > 1.0]
        for xi in xis:
            forms = entropy.entropy_forms(solver.solve_Y(h, float(xi)))
            assert forms.spread <= 1e-10, f"h={h} xi={xi}: {forms}"

    def test_forms_survive_the_cap_region(self):
        forms = entropy.entropy_forms(solver.solve_Y(1.9, 1e-3))
        assert forms.from_Y >= 0
        assert forms.spread <= 1e-10

    def test_forms_agree_relative_to_the_entropy_near_the_cap(self):
        point = solver.solve_Y(1.9, 1e-3)
        u, t = point.offset, point.log_offset
        # S = n u (1 - t) to first order in u ~ 1e-30
        expected = point.n * u * (1.0 - t)
        forms = entropy.entropy_forms(point)
        for value in (forms.from_n, forms.from_Y, forms.from_pq):
            assert value == pytest.approx(expected, rel=1e-12)

    def test_spread_is_relative_to_the_entropy(self):
        forms = EntropyForms(n=10.0, from_n=0.0, from_Y=7.0e-28, from_pq=6.9e-28)
        assert forms.spread == pytest.approx(1.0)

    def test_spread_on_the_cap_falls_back_to_n(self):
        forms = EntropyForms(n=2.0, from_n=0.0, from_Y=1e-310, from_pq=0.0)
        assert forms.spread == pytest.approx(5e-311)

    def test_forms_vanish_once_the_offset_underflows(self):
        forms = entropy.entropy_forms(solver.solve_Y(1.99, 1e-6))
        assert (forms.from_n, forms.from_Y, forms.from_pq) == (0.0, 0.0, 0.0)
        assert forms.spread == 0.0

    def test_high_energy_state_is_empty(self):
        assert entropy.entropy_from_Y(solver.solve_Y(1.5, 1e12)) < 1e-9

    def test_pq_form_validation(self):
        with pytest.raises(DomainError):
            entropy.entropy_from_pq(1.5, 1.2, -0.2)


class TestMicrostateProbability:
    def test_fermion(self):
        value = entropy.microstate_log_probability(WeightParams(G=3, N=1, h=1.0), 0.5)
        assert value == pytest.approx(-3 * math.log(2))

    def test_boson(self):
        value = entropy.microstate_log_probability(WeightParams(G=3, N=2, h=2.0), 1 / 3)
        assert value == pytest.approx(2 * math.log(1 / 3) + 2 * math.log(2 / 3))

    def test_semion(self):
        value = entropy.microstate_log_probability(WeightParams(G=4, N=2, h=1.5), 0.5)
        assert value == pytest.approx(2 * math.log(0.5) + 2.5 * math.log(0.5))

    @pytest.mark.parametrize("p", [0.0, 1.0, 1.5])
    def test_open_interval(self, p):
        with pytest.raises(DomainError):
            entropy.microstate_log_probability(WeightParams(G=3, N=1, h=1.0), p)


class TestNormalization:
    @pytest.mark.parametrize("p", [0.1, 0.3, 0.5, 0.7])
    @pytest.mark.parametrize("G", [1, 10, 20, 50])
    def test_fermions_are_normalized(self, p, G):
        assert abs(entropy.normalization_defect(1.0, p, G)) <= 1e-12

    def test_boson_defect_is_p_over_q(self):
        assert entropy.normalization_defect(2.0, 0.3, 20) == pytest.approx(0.3 / 0.7, rel=1e-9)

    def test_semion_defect_is_finite(self):
        defect = entropy.normalization_defect(1.5, 0.3, 200)
        assert math.isfinite(defect)

    def test_validation(self):
        with pytest.raises(DomainError):
            entropy.normalization_defect(1.0, 0.0, 10)
        with pytest.raises(DomainError):
            entropy.normalization_defect(1.0, 0.5, 0)


class TestBoltzmannConsistency:
    @pytest.mark.parametrize("h, n", [(1.0, 0.5), (1.5, 0.5), (2.0, 1.0)])
    def test_large_system_limit(self, h, n):
        values = [entropy.boltzmann_consistency(h, n, 10 ** k) for k in range(3, 8)]
        assert values[-1] <= 1e-5
        assert all(b < a for a, b in zip(values, values[1:])), values

    def test_infeasible(self):
        with pytest.raises(InfeasibleOccupancyError):
            entropy.boltzmann_consistency(1.0, 1.5, 10)


class TestFiniteSize:
    def test_ensemble_entropy_matches_pq_form_for_fermions(self):
        for p in (0.1, 0.5, 0.7):
            expected = entropy.entropy_from_pq(1.0, p, 1 - p)
            assert entropy.ensemble_entropy(1.0, p, 30) == pytest.approx(expected, rel=1e-12)

    def test_finite_size_occupation_approaches_the_distribution(self):
        p = 0.4
        limit = p / ((1 - p) + (2 - 1.5) * p)
        assert entropy.finite_size_occupation(1.5, p, 10 ** 9) == pytest.approx(limit, rel=1e-8)
        assert entropy.finite_size_occupation(1.0, p, 10) == pytest.approx(p)
