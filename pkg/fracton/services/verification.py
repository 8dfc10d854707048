"""
Identity suite behind `fracton verify`.

Every check returns a CheckResult. Asserted checks are PASS/FAIL; known
discrepancies (normalization for h != 1, p <-> 1 - p symmetry for h != 1) are
reported as INFO and never fail the run.
"""
import logging
import math
from collections import Counter
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Dict, Iterator, List, Optional, Sequence

import numpy as np

from fracton.algebra.classes import (
    class_from_nu,
    class_members,
    class_of_spin,
    dual_class,
    susy_partner_spin,
)
from fracton.algebra.fqhe import (
    band_vertices,
    dual_pairs,
    farey_graph,
    farey_sequence,
    lll_occupation,
    transition_allowed,
)
from fracton.config import settings
from fracton.models import AmplitudeVector, CheckResult, FillingFactor, FractonClass, OccupationState, WeightParams
from fracton.services import entanglement, entropy, solver

logger = logging.getLogger(__name__)

MODULES = ("classes", "solver", "entropy", "entanglement", "fqhe")

Check = Callable[[], CheckResult]


def _rationals(low: Fraction, high: Fraction, max_denominator: int) -> Iterator[Fraction]:
    """Distinct rationals in the open interval (low, high), denominators <= max_denominator"""
    seen = set()
    for q in range(1, max_denominator + 1):
        for p in range(math.floor(low * q), math.ceil(high * q) + 1):
            value = Fraction(p, q)
            if low < value < high and value not in seen:
                seen.add(value)
                yield value


def _xi_grid(count: int = 100) -> np.ndarray:
    return np.geomspace(1e-3, 1e3, count)


class VerificationSuite:
    """Runs the per-module identity checks"""

    def __init__(self, solver_tolerance: Optional[float] = None):
        self.solver_tolerance = solver_tolerance
        self.identity_tolerance = settings.identity_tolerance
        self.registry: Dict[str, List[Check]] = {
            "classes": [
                self.check_dual_involution,
                self.check_band_consistency,
                self.check_mirror_symmetry,
                self.check_spin_statistics,
                self.check_susy_duality,
                self.check_class_sequences,
            ],
            "solver": [
                self.check_closed_form_agreement,
                self.check_partition_identity,
                self.check_pq_relations,
                self.check_occupation_monotonicity,
                self.check_wide_range_convergence,
                self.check_lll_limits,
                self.check_step_distribution,
            ],
            "entropy": [
                self.check_three_form_agreement,
                self.check_weight_reductions,
                self.check_boltzmann_consistency,
                self.check_fermion_normalization,
                self.report_normalization_defects,
                self.check_ensemble_entropy,
                self.check_entropy_vanishes,
            ],
            "entanglement": [
                self.check_class_ordering,
                self.check_half_filling_values,
                self.check_concavity,
                self.check_fermion_symmetry,
                self.report_symmetry_defect,
                self.check_boundary_vanishing,
                self.check_basis_enumeration,
                self.check_basis_counts,
                self.check_fermion_state,
                self.check_semion_state,
                self.check_state_invariance,
                self.check_measure_by_filling,
            ],
            "fqhe": [
                self.check_occupation_pairs,
                self.check_occupation_matches_class,
                self.check_edges_unimodular,
                self.check_edges_match_brute_force,
                self.check_farey_neighbours,
                self.check_dual_pairs_joint,
            ],
        }

    def _solve(self, h, xi: float, closed_form: bool = True):
        return solver.solve_Y(h, xi, tolerance=self.solver_tolerance, closed_form=closed_form)

    @staticmethod
    def _result(module: str, name: str, ok: bool, detail: str = "") -> CheckResult:
        return CheckResult(module=module, name=name, status="PASS" if ok else "FAIL", detail=detail)

    # classes

    def check_dual_involution(self) -> CheckResult:
        classes = [FractonClass(h=h) for h in _rationals(Fraction(1), Fraction(2), 20)]
        classes += [FractonClass(h=1), FractonClass(h=2)]
        bad = [c for c in classes if dual_class(dual_class(c)) != c]
        return self._result("classes", "dual_involution", not bad, f"{len(classes)} classes, {len(bad)} violations")

    def check_band_consistency(self) -> CheckResult:
        bad = []
        count = 0
        for h in _rationals(Fraction(1), Fraction(2), 20):
            fracton_class = FractonClass(h=h)
            for band, nu in enumerate(class_members(fracton_class, 4)):
                count += 1
                if class_from_nu(nu) != fracton_class or nu.band != band:
                    bad.append(str(nu))
        return self._result("classes", "band_consistency", not bad, f"{count} members, {len(bad)} violations")

    def check_mirror_symmetry(self) -> CheckResult:
        values = list(_rationals(Fraction(0), Fraction(1), 20))
        bad = [nu for nu in values if class_from_nu(nu) != class_from_nu(2 - nu)]
        return self._result("classes", "mirror_symmetry", not bad, f"{len(values)} filling factors")

    def check_spin_statistics(self) -> CheckResult:
        spins = list(_rationals(Fraction(0), Fraction(1, 2), 20))
        bad = [s for s in spins if class_of_spin(s) != class_from_nu(2 * s)]
        return self._result("classes", "spin_statistics", not bad, f"{len(spins)} spins")

    def check_susy_duality(self) -> CheckResult:
        spins = list(_rationals(Fraction(0), Fraction(1, 2), 20))
        bad = [
            s for s in spins
            if class_from_nu(2 * susy_partner_spin(s)) != dual_class(class_from_nu(2 * s))
        ]
        return self._result("classes", "susy_duality", not bad, f"{len(spins)} pairs (s, s + 1/2)")

    def check_class_sequences(self) -> CheckResult:
        expected = {
            Fraction(3, 2): ["1/2", "3/2", "5/2"],
            Fraction(5, 3): ["1/3", "5/3", "7/3"],
            Fraction(4, 3): ["2/3", "4/3", "8/3"],
        }
        bad = [
            str(h) for h, members in expected.items()
            if [str(nu) for nu in class_members(FractonClass(h=h), 3)] != members
        ]
        return self._result("classes", "class_sequences", not bad, ", ".join(bad))

    # solver

    def check_closed_form_agreement(self) -> CheckResult:
        worst = 0.0
        for h in (1.0, 1.5, 2.0):
            xis = _xi_grid()
            if h == 2.0:
                xis = xis[xis > 1.0]
            for xi in xis:
                exact = self._solve(h, float(xi)).n
                generic = self._solve(h, float(xi), closed_form=False).n
                worst = max(worst, abs(generic - exact) / exact)
            if h == 1.5:
                for xi in xis:
                    generic = self._solve(h, float(xi), closed_form=False).n
                    reference = solver.semion_occupation(float(xi))
                    worst = max(worst, abs(generic - reference) / reference)
        return self._result("solver", "closed_form_agreement", worst <= self.identity_tolerance,
                            f"max relative error {worst:.3e}")

    def check_partition_identity(self) -> CheckResult:
        worst = 0.0
        for h in np.arange(1, 10) / 10 + 1.0:
            for xi in _xi_grid():
                point = self._solve(float(h), float(xi))
                worst = max(worst, solver.partition_identity_defect(point))
        return self._result("solver", "partition_identity", worst <= self.identity_tolerance,
                            f"max defect {worst:.3e}")

    def check_pq_relations(self) -> CheckResult:
        worst = 0.0
        for h in np.arange(0, 10) / 10 + 1.0:
            for xi in _xi_grid():
                point = self._solve(float(h), float(xi))
                worst = max(
                    worst,
                    abs(point.p + point.q - 1.0),
                    abs(point.p / (point.q + (2.0 - point.h) * point.p) - point.n) / point.n,
                )
        return self._result("solver", "pq_relations", worst <= 1e-12, f"max deviation {worst:.3e}")

    def check_occupation_monotonicity(self) -> CheckResult:
        hs = [float(h) for h in np.arange(0, 10) / 10 + 1.0]
        # below xi ~ 0.1 the h = 1.9 occupation sits on its cap to double precision
        xis = np.geomspace(0.1, 1e3, 40)
        table = np.array([[self._solve(h, float(xi)).n for xi in xis] for h in hs])
        decreasing_in_xi = bool(np.all(np.diff(table, axis=1) < 0))
        increasing_in_h = bool(np.all(np.diff(table, axis=0) > 0))
        bose = [self._solve(2.0, float(xi)).n for xi in xis[xis > 1.0]]
        fermi_below_bose = all(
            self._solve(1.9, float(xi)).n < n for xi, n in zip(xis[xis > 1.0], bose)
        )
        increasing_in_h = increasing_in_h and fermi_below_bose
        return self._result("solver", "occupation_monotonicity", decreasing_in_xi and increasing_in_h,
                            f"decreasing in xi: {decreasing_in_xi}, increasing in h: {increasing_in_h}")

    def check_wide_range_convergence(self) -> CheckResult:
        failures = 0
        for h in [*(np.arange(1, 10) / 10 + 1.0), 1.99, 1.999, 1.9999]:
            for xi in np.geomspace(1e-6, 1e6, 61):
                point = self._solve(float(h), float(xi), closed_form=False)
                if not point.converged:
                    failures += 1
        return self._result("solver", "wide_range_convergence", failures == 0,
                            f"{failures} unconverged points over xi in [1e-6, 1e6]")

    def check_lll_limits(self) -> CheckResult:
        expected = {Fraction(4, 3): 1.5, Fraction(3, 2): 2.0, Fraction(5, 3): 3.0, Fraction(1): 1.0}
        worst = 0.0
        for h, n in expected.items():
            worst = max(worst, abs(self._solve(h, 1e-8).n - n) / n, abs(solver.lll_limit(h) - n) / n)
        return self._result("solver", "lll_limits", worst <= 1e-6, f"max relative error {worst:.3e}")

    def check_step_distribution(self) -> CheckResult:
        ok = (
            math.isclose(solver.step_distribution(Fraction(5, 3), 0.0, 1.0), 3.0, rel_tol=1e-12)
            and math.isclose(solver.step_distribution(Fraction(3, 2), 1.0, 1.0), 2.0, rel_tol=1e-12)
            and solver.step_distribution(1, 0.0, 1.0) == 1.0
            and solver.step_distribution(Fraction(3, 2), 2.0, 1.0) == 0.0
        )
        return self._result("solver", "step_distribution", ok)

    # entropy

    def check_three_form_agreement(self) -> CheckResult:
        worst = 0.0
        for h in np.arange(0, 11) / 10 + 1.0:
            xis = _xi_grid()
            if h == 2.0:
                xis = xis[xis > 1.0]
            for xi in xis:
                forms = entropy.entropy_forms(self._solve(float(h), float(xi)))
                worst = max(worst, forms.spread)
        return self._result("entropy", "three_form_agreement", worst <= self.identity_tolerance,
                            f"max relative spread {worst:.3e}")

    def check_weight_reductions(self) -> CheckResult:
        worst = 0.0
        for G in range(1, 31):
            for N in range(0, G + 1):
                fermion = entropy.log_weight(WeightParams(G=G, N=N, h=1.0))
                worst = max(worst, abs(fermion - math.log(math.comb(G, N))))
            for N in range(0, 31):
                boson = entropy.log_weight(WeightParams(G=G, N=N, h=2.0))
                worst = max(worst, abs(boson - math.log(math.comb(N + G - 1, N))))
        return self._result("entropy", "weight_reductions", worst <= 1e-10, f"max deviation {worst:.3e}")

    def check_boltzmann_consistency(self) -> CheckResult:
        sizes = [10 ** k for k in range(3, 8)]
        details = []
        ok = True
        for h, n in ((1.0, 0.5), (1.5, 0.5), (2.0, 1.0)):
            values = [entropy.boltzmann_consistency(h, n, G) for G in sizes]
            decreasing = all(b < a for a, b in zip(values, values[1:]))
            ok = ok and decreasing and values[-1] <= 1e-5
            details.append(f"h={h}: {values[-1]:.2e}")
        return self._result("entropy", "boltzmann_consistency", ok, "; ".join(details))

    def check_fermion_normalization(self) -> CheckResult:
        worst = 0.0
        for p in (0.1, 0.3, 0.5, 0.7):
            for G in (1, 10, 20, 50):
                worst = max(worst, abs(entropy.normalization_defect(1.0, p, G)))
        return self._result("entropy", "fermion_normalization", worst <= 1e-12, f"max defect {worst:.3e}")

    def report_normalization_defects(self) -> CheckResult:
        parts = []
        for h in (1.5, 2.0):
            defect = entropy.normalization_defect(h, 0.3, 200)
            parts.append(f"h={h}: {defect:.6g}")
        parts.append(f"analytic boson value p/q = {0.3 / 0.7:.6g}")
        return CheckResult(module="entropy", name="normalization_defect", status="INFO",
                           detail="; ".join(parts) + " (sum W P = 1 holds only for fermions)")

    def check_ensemble_entropy(self) -> CheckResult:
        worst = 0.0
        for p in (0.1, 0.3, 0.5, 0.7):
            for G in (10, 50):
                expected = entropy.entropy_from_pq(1.0, p, 1.0 - p)
                worst = max(worst, abs(entropy.ensemble_entropy(1.0, p, G) - expected) / expected)
        return self._result("entropy", "ensemble_entropy_fermions", worst <= 1e-12,
                            f"max relative deviation {worst:.3e}")

    def check_entropy_vanishes(self) -> CheckResult:
        hs = [1.0, 1.25, 1.5, 1.75, 2.0]
        values = [entropy.entropy_from_n(h, n) for h in hs for n in (1e-12, 1e-3, 0.4)]
        tiny = max(entropy.entropy_from_n(h, 1e-12) for h in hs)
        ok = all(v >= 0.0 for v in values) and tiny < 1e-9
        return self._result("entropy", "entropy_vanishes", ok, f"S(n=1e-12) <= {tiny:.3e}")

    # entanglement

    @staticmethod
    def _p_grid() -> List[float]:
        return [round(0.05 * k, 2) for k in range(1, 20)]

    def check_class_ordering(self) -> CheckResult:
        bad = [
            p for p in self._p_grid()
            if not entanglement.measure(Fraction(4, 3), p) < entanglement.measure(Fraction(3, 2), p)
            < entanglement.measure(Fraction(5, 3), p)
        ]
        hs = np.linspace(1.0, 1.95, 20)
        monotone = all(
            np.all(np.diff([entanglement.measure(float(h), p) for h in hs]) > 0) for p in self._p_grid()
        )
        return self._result("entanglement", "class_ordering", not bad and monotone,
                            f"E[4/3] < E[3/2] < E[5/3] at {len(self._p_grid()) - len(bad)} of {len(self._p_grid())} points")

    def check_half_filling_values(self) -> CheckResult:
        expected = {Fraction(4, 3): 6 / 5, Fraction(3, 2): 4 / 3, Fraction(5, 3): 3 / 2, Fraction(1): 1.0}
        worst = max(abs(entanglement.measure(h, 0.5) - value) for h, value in expected.items())
        return self._result("entanglement", "half_filling_values", worst <= 1e-12, f"max deviation {worst:.3e}")

    def check_concavity(self) -> CheckResult:
        worst = -math.inf
        for h in (Fraction(4, 3), Fraction(3, 2), Fraction(5, 3)):
            curve = [entanglement.measure(h, p) for p in self._p_grid()]
            worst = max(worst, float(np.max(np.diff(curve, 2))))
        return self._result("entanglement", "concavity", worst <= 0.0, f"largest second difference {worst:.3e}")

    def check_fermion_symmetry(self) -> CheckResult:
        worst = max(entanglement.symmetry_defect(1, p) for p in self._p_grid())
        return self._result("entanglement", "fermion_symmetry", worst <= 1e-12, f"max defect {worst:.3e}")

    def report_symmetry_defect(self) -> CheckResult:
        defect = entanglement.symmetry_defect(Fraction(3, 2), 0.25)
        return CheckResult(module="entanglement", name="symmetry_defect", status="INFO",
                           detail=f"|E[3/2, 0.25] - E[3/2, 0.75]| = {defect:.6g} (symmetric only for fermions)")

    def check_boundary_vanishing(self) -> CheckResult:
        hs = [1, Fraction(4, 3), Fraction(3, 2), Fraction(5, 3), 1.99]
        ok = all(entanglement.measure(h, 0.0) == 0.0 and entanglement.measure(h, 1.0) == 0.0 for h in hs)
        return self._result("entanglement", "boundary_vanishing", ok)

    def check_basis_enumeration(self) -> CheckResult:
        kets = {state.label for state in entanglement.enumerate_basis(FractonClass(h=Fraction(3, 2)), 3, 4)}
        expected = {"121", "022", "211", "202", "112", "220"}
        return self._result("entanglement", "basis_enumeration", kets == expected, f"{sorted(kets)}")

    def check_basis_counts(self) -> CheckResult:
        bad = []
        for cap in (1, 2, 3):
            fracton_class = FractonClass(h=2 - Fraction(1, cap))
            for modes in range(1, 7):
                oracle = Counter(sum(v) for v in product(range(cap + 1), repeat=modes))
                for particles in range(0, 13):
                    enumerated = len(entanglement.enumerate_basis(fracton_class, modes, particles))
                    counted = entanglement.count_bounded_compositions(modes, particles, cap)
                    if not enumerated == counted == oracle.get(particles, 0):
                        bad.append((cap, modes, particles))
        return self._result("entanglement", "basis_counts", not bad, f"{len(bad)} mismatches")

    def check_fermion_state(self) -> CheckResult:
        states = tuple(OccupationState.parse(label) for label in ("110", "101", "011"))
        vector = AmplitudeVector(states=states, amplitudes=(1 / math.sqrt(3),) * 3)
        value = entanglement.state_entanglement(1, vector)
        expected = 3 * math.log2(3) - 2
        return self._result("entanglement", "fermion_state", abs(value - expected) <= 1e-9,
                            f"{value:.10f} vs 3 log2 3 - 2 = {expected:.10f}")

    def check_semion_state(self) -> CheckResult:
        fracton_class = FractonClass(h=Fraction(3, 2))
        states = tuple(entanglement.enumerate_basis(fracton_class, 3, 4))
        vector = AmplitudeVector(states=states, amplitudes=(1 / math.sqrt(6),) * 6)
        value = entanglement.state_entanglement(fracton_class, vector)
        expected = 72 / 11 * entanglement.binary_entropy(1 / 6)
        return self._result("entanglement", "semion_state", abs(value - expected) <= 1e-9,
                            f"{value:.10f} vs 72/11 H2(1/6) = {expected:.10f}")

    def check_state_invariance(self) -> CheckResult:
        states = tuple(OccupationState.parse(label) for label in ("121", "022", "211"))
        amplitudes = (0.6, 0.64j, math.sqrt(1 - 0.36 - 0.4096))
        base = entanglement.state_entanglement(1.5, AmplitudeVector(states=states, amplitudes=amplitudes))
        permuted = entanglement.state_entanglement(
            1.5, AmplitudeVector(states=states[::-1], amplitudes=amplitudes[::-1])
        )
        phase = complex(math.cos(0.7), math.sin(0.7))
        rotated = entanglement.state_entanglement(
            1.5, AmplitudeVector(states=states, amplitudes=tuple(phase * c for c in amplitudes))
        )
        worst = max(abs(permuted - base), abs(rotated - base))
        return self._result("entanglement", "state_invariance", worst <= 1e-12, f"max deviation {worst:.3e}")

    def check_measure_by_filling(self) -> CheckResult:
        bad = []
        for nu in list(_rationals(Fraction(0), Fraction(1), 12)) + [Fraction(1)]:
            for p in self._p_grid():
                if entanglement.measure_by_filling(nu, p) != entanglement.measure(class_from_nu(nu), p):
                    bad.append(nu)
        return self._result("entanglement", "measure_by_filling", not bad, f"{len(bad)} mismatches")

    # fqhe

    def check_occupation_pairs(self) -> CheckResult:
        pairs = {
            "2/3": Fraction(3, 2), "4/3": Fraction(3, 2), "8/3": Fraction(3, 2),
            "1/2": Fraction(2), "3/2": Fraction(2), "5/2": Fraction(2),
            "1/3": Fraction(3), "5/3": Fraction(3), "7/3": Fraction(3),
        }
        bad = [nu for nu, n in pairs.items() if lll_occupation(FillingFactor.of(nu)) != n]
        return self._result("fqhe", "occupation_pairs", not bad, f"{len(pairs) - len(bad)} of {len(pairs)} pairs")

    def check_occupation_matches_class(self) -> CheckResult:
        bad = []
        count = 0
        for band in range(4):
            for nu in band_vertices(12, band):
                count += 1
                if lll_occupation(nu) != 1 / (2 - class_from_nu(nu).h):
                    bad.append(str(nu))
        return self._result("fqhe", "occupation_matches_class", not bad, f"{count} filling factors")

    def check_edges_unimodular(self) -> CheckResult:
        bad = 0
        symmetric = True
        for band in range(3):
            graph = farey_graph(8, band)
            for a, b in graph.edges:
                if abs(b.numerator * a.denominator - a.numerator * b.denominator) != 1:
                    bad += 1
                symmetric = symmetric and transition_allowed(b, a)
        return self._result("fqhe", "edges_unimodular", bad == 0 and symmetric, f"{bad} bad edges")

    def check_edges_match_brute_force(self) -> CheckResult:
        bad = []
        for max_denominator in range(1, 9):
            graph = farey_graph(max_denominator)
            emitted = {frozenset((a.value, b.value)) for a, b in graph.edges}
            vertices = sorted(_rationals(Fraction(0), Fraction(1), max_denominator))
            oracle = {
                frozenset((a, b)) for a, b in combinations(vertices, 2)
                if abs(b.numerator * a.denominator - a.numerator * b.denominator) == 1
            }
            if emitted != oracle or [nu.value for nu in graph.vertices] != vertices:
                bad.append(max_denominator)
        return self._result("fqhe", "edges_match_brute_force", not bad, f"max denominators failing: {bad}")

    def check_farey_neighbours(self) -> CheckResult:
        missing = 0
        for order in range(2, 9):
            graph = farey_graph(order)
            edges = {frozenset((a.value, b.value)) for a, b in graph.edges}
            interior = farey_sequence(order)[1:-1]
            missing += sum(1 for a, b in zip(interior, interior[1:]) if frozenset((a, b)) not in edges)
        return self._result("fqhe", "farey_neighbours", missing == 0, f"{missing} unconnected neighbours")

    def check_dual_pairs_joint(self) -> CheckResult:
        bad = 0
        for band in range(3):
            graph = farey_graph(10, band)
            vertex_set = set(graph.vertices)
            for pair in dual_pairs(graph):
                if pair.dual not in vertex_set or pair.h.h + pair.dual_h.h != 3:
                    bad += 1
        return self._result("fqhe", "dual_pairs_joint", bad == 0, f"{bad} unmatched vertices")

    def run(self, only: Sequence[str] = ()) -> List[CheckResult]:
        """Run the checks of the selected modules (all when `only` is empty)"""
        selected = [module for module in MODULES if not only or module in only]
        logger.info("=" * 60)
        logger.info(f"Starting verification of {', '.join(selected)}")
        if self.solver_tolerance is not None:
            logger.info(f"Solver tolerance overridden to {self.solver_tolerance}")
        logger.info("=" * 60)

        results: List[CheckResult] = []
        for module in selected:
            logger.info(f"Checking {module}...")
            for check in self.registry[module]:
                try:
                    result = check()
                except Exception as e:
                    logger.error(f"Check {check.__name__} raised: {e}")
                    result = CheckResult(module=module, name=check.__name__.removeprefix("check_"),
                                         status="FAIL", detail=f"raised {type(e).__name__}: {e}")
                logger.debug(f"{result.module}.{result.name}: {result.status} {result.detail}")
                results.append(result)

        failed = sum(1 for r in results if r.status == "FAIL")
        logger.info("=" * 60)
        logger.info(f"Verification finished: {len(results)} checks, {failed} failed")
        logger.info("=" * 60)
        return results


def format_report(results: List[CheckResult]) -> str:
    lines = [f"{r.status:<5} {r.module:<13} {r.name:<28} {r.detail}".rstrip() for r in results]
    return "\n".join(lines) + "\n"
