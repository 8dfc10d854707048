"""
Statistical weights, microstate probabilities and the fractal von Neumann
entropy. Everything is evaluated in log space with log-gamma; entropies are in
nats with K = 1.
"""
import logging
import math
from typing import Iterator, Optional, Tuple

import numpy as np
from scipy import special

from fracton.algebra.classes import HLike, as_float
from fracton.config import settings
from fracton.exceptions import DomainError, InfeasibleOccupancyError
from fracton.models import EntropyForms, SolverPoint, WeightParams

logger = logging.getLogger(__name__)

# y slightly below zero from rounding in G + (N - 1)(h - 1) - N counts as zero
Y_SLACK = 1e-9


def log_weight(params: WeightParams) -> float:
    """ln W = ln Gamma(x + y + 1) - ln Gamma(x + 1) - ln Gamma(y + 1)

    x = N and y = G + (N - 1)(h - 1) - N; reduces to ln C(G, N) for fermions and
    ln C(N + G - 1, N) for bosons.
    """
    y = params.y
    if y < -Y_SLACK:
        raise InfeasibleOccupancyError(
            f"N={params.N} particles exceed the capacity of G={params.G} states at h={params.h} (y={y})"
        )
    y = max(y, 0.0)
    x = params.x
    return float(special.gammaln(x + y + 1.0) - special.gammaln(x + 1.0) - special.gammaln(y + 1.0))


def entropy_from_n(h: HLike, n: float) -> float:
    """S/K = [1 + (h-1)n] ln{[1 + (h-1)n]/n} - [1 + (h-2)n] ln{[1 + (h-2)n]/n}"""
    h = as_float(h)
    if not math.isfinite(n) or n < 0.0:
        raise DomainError(f"occupation must be a non-negative number, got {n}")
    if n == 0.0:
        return 0.0
    a = 1.0 + (h - 1.0) * n
    b = 1.0 + (h - 2.0) * n
    if b <= 0.0:
        raise DomainError(f"n={n} is at or beyond the class cap 1/(2 - h) for h={h}")
    return _bracket_entropy(a, b, n)


def _bracket_entropy(a: float, b: float, n: float) -> float:
    # a = n + b, so a ln a - b ln b - n ln n = n ln(1 + b/n) + b ln(a/b)
    return float(n * math.log1p(b / n) + special.xlogy(b, a) - special.xlogy(b, b))


def entropy_from_Y(point: SolverPoint) -> float:
    """S/K = n [(Y - 1) ln(Y - 1) - (Y - 2) ln(Y - 2)]"""
    u = point.offset
    return point.n * float((1.0 + u) * math.log1p(u) - u * point.log_offset)


def _pq_entropy(h: float, p: float, q: float, minus_p_log_p: float, minus_q_log_q: float) -> float:
    return float((minus_p_log_p + minus_q_log_q) / (q + (2.0 - h) * p))


def entropy_from_pq(h: HLike, p: float, q: float) -> float:
    """S/K = (-p ln p - q ln q)/(q + (2 - h) p)"""
    h = as_float(h)
    if not (0.0 <= p <= 1.0 and 0.0 <= q <= 1.0):
        raise DomainError(f"p and q must be probabilities, got p={p}, q={q}")
    return _pq_entropy(h, p, q, float(special.entr(p)), float(special.entr(q)))


def entropy_forms(point: SolverPoint) -> EntropyForms:
    """All three entropy expressions at a solved point

    The n-form brackets are taken from the offset, 1 + (h - 1)n = (Y - 1)n and
    1 + (h - 2)n = (Y - 2)n, which stay positive right up to the cap. In the
    p,q form ln p = -ln(1 + u) and ln q = t - ln(1 + u), so p = 1 - q rounding
    to 1 near the cap loses nothing.
    """
    n = point.n
    u = point.offset
    log_one_plus = math.log1p(u)
    return EntropyForms(
        n=n,
        from_n=_bracket_entropy((1.0 + u) * n, u * n, n),
        from_Y=entropy_from_Y(point),
        from_pq=_pq_entropy(point.h, point.p, point.q,
                            point.p * log_one_plus, -point.q * (point.log_offset - log_one_plus)),
    )


def microstate_log_probability(params: WeightParams, p: float) -> float:
    """ln P = N ln p + ([n(h - 2) + 1] G - (h - 1)) ln q with q = 1 - p"""
    if not 0.0 < p < 1.0:
        raise DomainError(f"microstate probability needs 0 < p < 1, got {p}")
    h = params.h
    exponent = params.N * (h - 2.0) + params.G - (h - 1.0)
    return params.N * math.log(p) + exponent * math.log1p(-p)


def _max_particles(h: float, G: int) -> Optional[int]:
    """Largest N with y >= 0, None when unbounded (h = 2)"""
    if h == 2.0:
        return None
    return int(math.floor((G - (h - 1.0)) / (2.0 - h) + Y_SLACK))


def _series(h: float, p: float, G: int) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """Blocks of (ln W(N) + ln P(N), ln P(N)) over feasible N

    The series is cut once terms are decreasing and `series_cutoff` nats
    below the running total.
    """
    n_max = _max_particles(h, G)
    block = settings.series_block_size
    total = -np.inf
    start = 0
    while True:
        stop = start + block
        if n_max is not None:
            stop = min(stop, n_max + 1)
        if start >= stop:
            return
        N = np.arange(start, stop, dtype=float)
        y = np.maximum(G + (N - 1.0) * (h - 1.0) - N, 0.0)
        log_w = special.gammaln(N + y + 1.0) - special.gammaln(N + 1.0) - special.gammaln(y + 1.0)
        log_p = N * math.log(p) + (N * (h - 2.0) + G - (h - 1.0)) * math.log1p(-p)
        log_terms = log_w + log_p
        yield log_terms, log_p

        total = np.logaddexp(total, special.logsumexp(log_terms))
        start = stop
        tail_falling = len(log_terms) < 2 or log_terms[-1] < log_terms[-2]
        if tail_falling and log_terms[-1] < total - settings.series_cutoff:
            return
        if start >= settings.series_max_terms:
            logger.warning(f"Series for h={h}, p={p}, G={G} truncated at {start} terms")
            return


def normalization_defect(h: HLike, p: float, G: int) -> float:
    """sum_N W(N) P(N) - 1 over every feasible N

    Exact (to rounding) for fermions by the binomial theorem; for other classes
    the value is a diagnostic, e.g. p/q for bosons.
    """
    h = as_float(h)
    if not 0.0 < p < 1.0:
        raise DomainError(f"normalization needs 0 < p < 1, got {p}")
    if G < 1:
        raise DomainError(f"G must be a positive integer, got {G}")
    total = -np.inf
    for log_terms, _ in _series(h, p, G):
        total = np.logaddexp(total, special.logsumexp(log_terms))
    return float(np.expm1(total))


def ensemble_entropy(h: HLike, p: float, G: int) -> float:
    """-sum_N W(N) P(N) ln P(N) / G, the density-matrix entropy per state"""
    h = as_float(h)
    if not 0.0 < p < 1.0:
        raise DomainError(f"ensemble entropy needs 0 < p < 1, got {p}")
    total = 0.0
    for log_terms, log_p in _series(h, p, G):
        total -= float(np.sum(np.exp(log_terms) * log_p))
    return total / G


def finite_size_occupation(h: HLike, p: float, G: int) -> float:
    """n from n [q/p + 2 - h] G = G - (h - 1); tends to p/(q + (2 - h) p) as G grows"""
    h = as_float(h)
    if not 0.0 < p < 1.0:
        raise DomainError(f"needs 0 < p < 1, got {p}")
    q = 1.0 - p
    return (G - (h - 1.0)) / (G * (q / p + 2.0 - h))


def boltzmann_consistency(h: HLike, n: float, G: int) -> float:
    """|ln W(G, round(nG), h)/G - S(h, n)|, which vanishes like ln G / G"""
    h = as_float(h)
    N = int(math.floor(n * G + 0.5))
    params = WeightParams(G=G, N=N, h=h)
    if not params.y >= -Y_SLACK:
        raise InfeasibleOccupancyError(f"N={N} is infeasible for G={G}, h={h}")
    return abs(log_weight(params) / G - entropy_from_n(h, n))
