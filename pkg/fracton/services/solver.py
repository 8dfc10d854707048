"""
Fractal distribution function n = 1/(Y[xi] - h).

Y[xi] is the root Y > 2 of (Y - 1)^(h - 1) (Y - 2)^(2 - h) = xi. The solve runs
in t = ln(Y - 2):

    g(t) = (h - 1) ln(1 + e^t) + (2 - h) t - ln xi = 0

g is strictly increasing, so a bracket always exists; bisection narrows it and
Newton polishes the root. The point keeps t itself as `log_offset`: for small
xi near h = 2, Y - 2 = e^t falls below the smallest double long before t does.
"""
import logging
import math
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
from scipy import optimize, special

from fracton.algebra.classes import HLike, as_float
from fracton.config import settings
from fracton.exceptions import BoseDivergenceError, ConvergenceError, DomainError, OccupationDivergenceError
from fracton.models import SolverPoint, StatisticalPoint

logger = logging.getLogger(__name__)

# ln of the largest finite double
MAX_LOG_XI = math.log(np.finfo(float).max)


def _check_log_xi(log_xi: float) -> None:
    if not math.isfinite(log_xi) or log_xi >= MAX_LOG_XI:
        raise DomainError(f"xi must be positive and finite, got ln xi = {log_xi}")


def _residual(h: float, log_xi: float) -> Callable[[float], float]:
    def g(t: float) -> float:
        return (h - 1.0) * np.logaddexp(0.0, t) + (2.0 - h) * t - log_xi
    return g


def _derivative(h: float) -> Callable[[float], float]:
    def dg(t: float) -> float:
        return (h - 1.0) * float(special.expit(t)) + (2.0 - h)
    return dg


def _bracket(g: Callable[[float], float], log_xi: float) -> Tuple[float, float]:
    """Bracket [lo, hi] with g(lo) < 0 <= g(hi)

    Y_hi = xi + 2 always overshoots since (Y - 1)^(h - 1) (Y - 2)^(2 - h) >= Y - 2;
    one more e-fold keeps the root strictly inside.
    """
    hi = log_xi + 1.0
    lo = min(log_xi, 0.0) - 1.0
    step = 1.0
    for _ in range(settings.bracket_expansions):
        if g(lo) < 0:
            return lo, hi
        step *= 2.0
        lo -= step
    raise ConvergenceError(f"could not bracket the root for ln xi = {log_xi}")


def _closed_form_log_offset(h: float, log_xi: float) -> Optional[float]:
    """ln(Y - 2) for h in {1, 3/2, 2}"""
    if h == 1.0:
        return log_xi
    if h == 2.0:
        return math.log(math.expm1(log_xi))
    if h == 1.5:
        # Y - 2 = 2 xi^2 / (1 + sqrt(1 + 4 xi^2)), scaled by 1/xi when xi is large
        if log_xi <= 0.0:
            return 2.0 * log_xi + math.log(2.0) - math.log1p(math.hypot(1.0, 2.0 * math.exp(log_xi)))
        inverse = math.exp(-log_xi)
        return log_xi + math.log(2.0) - math.log(inverse + math.hypot(inverse, 2.0))
    return None


def _point(h: float, log_xi: float, t: float, method: str,
           iterations: int = 0, residual: float = 0.0, converged: bool = True) -> SolverPoint:
    # e^t may underflow to 0 near h = 2; n then sits on the cap 1/(2 - h)
    offset = math.exp(t)
    if offset + 2.0 - h <= 0.0:
        raise DomainError(f"occupation diverges for h={h}, ln xi={log_xi}")
    return SolverPoint(
        xi=math.exp(log_xi),
        log_xi=log_xi,
        h=h,
        log_offset=t,
        offset=offset,
        Y=2.0 + offset,
        n=1.0 / (offset + 2.0 - h),
        theta=float(special.expit(t)),
        p=float(special.expit(-t)),
        q=float(special.expit(t)),
        method=method,
        iterations=iterations,
        residual=residual,
        converged=converged,
    )


def solve_log(
    h: HLike,
    log_xi: float,
    *,
    tolerance: Optional[float] = None,
    closed_form: bool = True,
) -> SolverPoint:
    """Solve for Y given ln xi = (epsilon - mu)/kT"""
    h = as_float(h)
    _check_log_xi(log_xi)
    tolerance = settings.solver_tolerance if tolerance is None else tolerance

    if h == 2.0 and log_xi <= 0.0:
        raise BoseDivergenceError(f"Bose divergence: h = 2 needs xi > 1 (mu < epsilon), got xi = {math.exp(log_xi)}")

    if closed_form:
        t = _closed_form_log_offset(h, log_xi)
        if t is not None:
            return _point(h, log_xi, t, "closed-form")

    g = _residual(h, log_xi)
    dg = _derivative(h)
    lo, hi = _bracket(g, log_xi)

    t, report = optimize.bisect(g, lo, hi, xtol=tolerance, maxiter=settings.solver_max_iterations,
                                full_output=True, disp=False)
    iterations = report.iterations

    # Newton polish; g is convex and increasing so steps stay well behaved
    residual = g(t)
    while abs(residual) > tolerance and iterations < settings.solver_max_iterations:
        t_next = t - residual / dg(t)
        if t_next == t:
            break
        t = min(max(t_next, lo), hi)
        residual = g(t)
        iterations += 1

    converged = abs(residual) <= tolerance
    if not converged:
        logger.warning(f"Solver stopped at |residual| = {abs(residual):.3e} for h={h}, ln xi={log_xi}")
    logger.debug(f"h={h} ln xi={log_xi}: t={t} after {iterations} iterations")

    return _point(h, log_xi, float(t), "bisection-newton", iterations, float(residual), converged)


def solve_Y(
    h: HLike,
    xi: float,
    *,
    tolerance: Optional[float] = None,
    closed_form: bool = True,
) -> SolverPoint:
    """Unique Y > 2 with (Y - 1)^(h - 1) (Y - 2)^(2 - h) = xi, plus derived fields

    Closed forms are used at h = 1 (Y = xi + 2), h = 2 (Y = xi + 1) and
    h = 3/2 (Y = (3 + sqrt(1 + 4 xi^2))/2) unless `closed_form` is False.
    """
    if isinstance(xi, bool) or not isinstance(xi, (int, float, np.floating, np.integer)):
        raise DomainError(f"xi must be a real number, got {xi!r}")
    xi = float(xi)
    if not math.isfinite(xi) or xi <= 0.0:
        raise DomainError(f"xi must be positive and finite, got {xi}")
    if as_float(h) == 2.0 and xi <= 1.0:
        raise BoseDivergenceError(f"Bose divergence: h = 2 needs xi > 1 (mu < epsilon), got xi = {xi}")
    return solve_log(h, math.log(xi), tolerance=tolerance, closed_form=closed_form)


def occupation(h: HLike, point: StatisticalPoint, *, tolerance: Optional[float] = None) -> float:
    """Average occupation n = 1/(Y[xi] - h) of one state"""
    return solve_log(h, point.reduced_energy, tolerance=tolerance).n


def partition_identity_defect(point: SolverPoint) -> float:
    """Relative defect of 1/xi = Theta^(h - 2) - Theta^(h - 1)

    Evaluated as Theta^(h - 2) (1 - Theta) in log space from t = ln(Y - 2):
    ln Theta = t - ln(1 + e^t) and ln(1 - Theta) = -ln(1 + e^t).
    """
    log_one_plus = math.log1p(point.offset)
    log_theta = point.log_offset - log_one_plus
    log_rhs = (point.h - 2.0) * log_theta - log_one_plus
    return abs(math.expm1(log_rhs + point.log_xi))


def step_distribution(h: HLike, epsilon: float, fermi_energy: float) -> float:
    """T = 0 occupation: 1/(2 - h) below the Fermi energy, 0 above

    At epsilon == fermi_energy the filled value is returned (left-continuous).
    """
    h = as_float(h)
    if h == 2.0:
        raise OccupationDivergenceError("step distribution diverges at h = 2 (n = infinity)")
    return 1.0 / (2.0 - h) if epsilon <= fermi_energy else 0.0


def lll_limit(h: HLike) -> float:
    """xi -> 0+ limit of the occupation, 1/(2 - h); infinite for bosons"""
    h = as_float(h)
    return math.inf if h == 2.0 else 1.0 / (2.0 - h)


def fermi_dirac(xi: float) -> float:
    return 1.0 / (xi + 1.0)


def bose_einstein(xi: float) -> float:
    if xi <= 1.0:
        raise BoseDivergenceError(f"Bose-Einstein occupation needs xi > 1, got {xi}")
    return 1.0 / (xi - 1.0)


def semion_occupation(xi: float) -> float:
    """Closed form n = 1/sqrt(1/4 + xi^2) of the h = 3/2 class"""
    return 1.0 / math.sqrt(0.25 + xi * xi)


def sweep(
    h: HLike,
    values: np.ndarray,
    *,
    log_xi: bool = False,
    tolerance: Optional[float] = None,
    closed_form: bool = True,
) -> List[Union[SolverPoint, DomainError]]:
    """Solve along a grid of xi (or of ln xi with `log_xi`)

    Failures are returned in place, grid order preserved.
    """
    solve = solve_log if log_xi else solve_Y
    results: List[Union[SolverPoint, DomainError]] = []
    for value in values:
        try:
            results.append(solve(h, float(value), tolerance=tolerance, closed_form=closed_form))
        except DomainError as e:
            logger.debug(f"Grid point {'ln xi' if log_xi else 'xi'}={value} rejected: {e}")
            results.append(e)
    return results
