"""
Occupation-number entanglement of fracton states.

    E[h, p] = H2(p) / (1 - (h - 1) p),   H2(p) = -p log2 p - (1 - p) log2 (1 - p)

A state sum_i c_i |n_i> carries sum_i E[h, |c_i|^2]. Values are in bits;
the entropy module works in nats (1 bit = ln 2 nats).
"""
import logging
import math
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, List, Optional, Tuple, Union

from scipy import special

from fracton.algebra.classes import HLike, as_float, class_from_nu
from fracton.config import settings
from fracton.exceptions import AmplitudeFileError, DomainError, NormalizationError, UnsupportedClassError
from fracton.models import AmplitudeVector, FillingFactor, FractonClass, OccupationState, TermContribution

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)


def binary_entropy(p: float) -> float:
    """H2(p) in bits, with 0 log 0 = 0"""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    return float((special.entr(p) + special.entr(1.0 - p)) / LN2)


def measure(h: HLike, p: float) -> float:
    """Entanglement measure E[h, p] in bits"""
    h = as_float(h)
    try:
        p = float(p)
    except (TypeError, ValueError) as e:
        raise DomainError(f"p must be a number, got {p!r}") from e
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    denominator = 1.0 - (h - 1.0) * p
    if denominator <= 0.0:
        raise DomainError(f"E[h, p] has a pole at h={h}, p={p}")
    return binary_entropy(p) / denominator


def symmetry_defect(h: HLike, p: float) -> float:
    """|E[h, p] - E[h, 1 - p]|; zero only for fermions"""
    return abs(measure(h, p) - measure(h, 1.0 - p))


def measure_by_filling(nu: Union[FillingFactor, Fraction, int, float], p: float) -> float:
    """E[2 - nu, p] for a band-0 filling factor, 0 < nu <= 1

    Exact filling factors go through the fractal spectrum so the result matches
    measure(class_from_nu(nu), p) bit for bit.
    """
    if isinstance(nu, float):
        if not 0.0 < nu <= 1.0:
            raise DomainError(
                f"measure_by_filling needs 0 < nu <= 1, got {nu}; map other filling factors "
                "through the fractal spectrum (class_from_nu) and call measure"
            )
        return measure(2.0 - nu, p)

    value = nu.value if isinstance(nu, FillingFactor) else Fraction(nu)
    if not 0 < value <= 1:
        raise DomainError(
            f"measure_by_filling needs 0 < nu <= 1, got {value}; map other filling factors "
            "through the fractal spectrum (class_from_nu) and call measure"
        )
    return measure(class_from_nu(value), p)


def _checked_probabilities(state: AmplitudeVector, tolerance: Optional[float]) -> List[float]:
    tolerance = settings.normalization_tolerance if tolerance is None else tolerance
    norm = state.norm_squared
    if abs(norm - 1.0) > tolerance:
        raise NormalizationError(f"sum |c_i|^2 = {norm!r} differs from 1 by more than {tolerance}")
    return [min(max(float(prob), 0.0), 1.0) for prob in state.probabilities]


def state_entanglement(h: HLike, state: AmplitudeVector, *, tolerance: Optional[float] = None) -> float:
    """sum_i E[h, |c_i|^2] over the basis terms of a normalized state"""
    return sum(measure(h, prob) for prob in _checked_probabilities(state, tolerance))


def state_breakdown(
    h: HLike, state: AmplitudeVector, *, tolerance: Optional[float] = None
) -> List[TermContribution]:
    """Per-term contributions to state_entanglement, in basis order"""
    probabilities = _checked_probabilities(state, tolerance)
    return [
        TermContribution(
            state=basis_state.label,
            amplitude_re=amplitude.real,
            amplitude_im=amplitude.imag,
            probability=prob,
            bits=measure(h, prob),
        )
        for basis_state, amplitude, prob in zip(state.states, state.amplitudes, probabilities)
    ]


def _require_cap(fracton_class: FractonClass) -> int:
    cap = fracton_class.cap
    if cap is None:
        raise UnsupportedClassError(
            f"class h={fracton_class.h} has no integer occupation cap 1/(2 - h)"
        )
    return cap


def _compositions(modes: int, particles: int, cap: int) -> Iterator[Tuple[int, ...]]:
    if modes == 1:
        if particles <= cap:
            yield (particles,)
        return
    low = max(0, particles - (modes - 1) * cap)
    for first in range(low, min(cap, particles) + 1):
        for rest in _compositions(modes - 1, particles - first, cap):
            yield (first,) + rest


def enumerate_basis(fracton_class: FractonClass, modes: int, particles: int) -> List[OccupationState]:
    """All occupation states of `modes` modes holding `particles`, each mode capped

    Lexicographic order; empty when particles > modes * cap.
    """
    cap = _require_cap(fracton_class)
    if modes < 1:
        raise DomainError(f"modes must be positive, got {modes}")
    if particles < 0:
        raise DomainError(f"particles must be non-negative, got {particles}")
    if particles > modes * cap:
        return []
    return [OccupationState(counts=counts) for counts in _compositions(modes, particles, cap)]


def count_bounded_compositions(modes: int, particles: int, cap: int) -> int:
    """Number of length-`modes` vectors in [0, cap] summing to `particles`"""
    total = 0
    for j in range(modes + 1):
        remaining = particles - j * (cap + 1)
        if remaining < 0:
            break
        total += (-1) ** j * math.comb(modes, j) * math.comb(remaining + modes - 1, modes - 1)
    return total


def load_amplitudes(
    lines: Iterable[str],
    fracton_class: FractonClass,
    modes: int,
    particles: int,
) -> AmplitudeVector:
    """Read `<occupation-string> <re> <im>` lines, validated against the basis

    Blank lines and lines starting with '#' are skipped.
    """
    basis = set(enumerate_basis(fracton_class, modes, particles))
    states: List[OccupationState] = []
    amplitudes: List[complex] = []

    for line_number, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 3:
            raise AmplitudeFileError(f"expected '<occupation> <re> <im>', got {line!r}", line_number)
        try:
            ket = OccupationState.parse(fields[0])
            amplitude = complex(float(fields[1]), float(fields[2]))
        except (DomainError, ValueError) as e:
            raise AmplitudeFileError(str(e), line_number) from e

        if ket.modes != modes:
            raise AmplitudeFileError(f"ket {ket.ket} has {ket.modes} modes, expected {modes}", line_number)
        if ket.particles != particles:
            raise AmplitudeFileError(
                f"ket {ket.ket} holds {ket.particles} particles, expected {particles}", line_number
            )
        if ket not in basis:
            raise AmplitudeFileError(
                f"ket {ket.ket} is not a basis state for h={fracton_class.h}", line_number
            )
        if ket in states:
            raise AmplitudeFileError(f"ket {ket.ket} appears twice", line_number)
        states.append(ket)
        amplitudes.append(amplitude)

    if not states:
        raise AmplitudeFileError("no amplitudes found")
    logger.info(f"Loaded {len(states)} amplitudes over a basis of {len(basis)} states")
    return AmplitudeVector(states=tuple(states), amplitudes=tuple(amplitudes))


def read_amplitude_file(
    path: Path, fracton_class: FractonClass, modes: int, particles: int
) -> AmplitudeVector:
    with open(path, encoding="utf-8") as handle:
        return load_amplitudes(handle, fracton_class, modes, particles)
