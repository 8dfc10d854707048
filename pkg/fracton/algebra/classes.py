"""
Exact algebra of the universal classes of fractons.

A class is labelled by its Hausdorff dimension h in [1, 2]. Filling factors
(statistical parameters) map onto classes through the banded fractal spectrum

    h - 1 = 1 - nu   on (0, 1)      h - 1 = nu - 1   on (1, 2)
    h - 1 = 3 - nu   on (2, 3)      h - 1 = nu - 3   on (3, 4)    ...

which repeats with period 2 and mirrors about every odd integer. Everything here
is exact rational arithmetic; `as_float` is the one place a class is narrowed
to floating point for the numerical services.
"""
import logging
import math
from fractions import Fraction
from typing import List, Tuple, Union

from fracton.exceptions import DomainError
from fracton.models import ClassParameter, FillingFactor, FractonClass

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)

NuLike = Union[FillingFactor, Fraction, int]
HLike = Union[FractonClass, ClassParameter, int]


def nu_value(nu: NuLike) -> Fraction:
    value = nu.value if isinstance(nu, FillingFactor) else Fraction(nu)
    if value <= 0:
        raise DomainError(f"filling factor must be positive, got {value}")
    return value


def class_from_nu(nu: NuLike) -> FractonClass:
    """Class of a filling factor (equivalently a statistical parameter)

    Integer filling factors close the bands: odd integers map to h = 1 and even
    integers to h = 2, which is where both neighbouring branches meet.
    """
    value = nu_value(nu)
    # position inside the period-2 cell, r in [0, 2)
    r = value % 2
    h = 2 - r if r < 1 else r
    return FractonClass(h=h)


def class_members(fracton_class: FractonClass, band_count: int) -> List[FillingFactor]:
    """The member of the class in each band (k, k + 1), k = 0 .. band_count - 1"""
    if band_count < 0:
        raise DomainError(f"band_count must be non-negative, got {band_count}")
    h = fracton_class.h

    if fracton_class.is_boundary:
        # h = 1 collects odd integers, h = 2 even integers
        logger.warning(f"Boundary class h={h} yields integer filling factors only")
        first = 1 if h == 1 else 2
        return [FillingFactor.of(first + 2 * k) for k in range(band_count)]

    members = []
    for k in range(band_count):
        cell = 2 * (k // 2)
        value = cell + (2 - h) if k % 2 == 0 else cell + h
        members.append(FillingFactor.of(value))
    return members


def dual_class(fracton_class: FractonClass) -> FractonClass:
    """h -> 3 - h; fermions and bosons are dual, h = 3/2 is self-dual"""
    return FractonClass(h=3 - fracton_class.h)


def dual_filling(nu: NuLike) -> FillingFactor:
    """Band-0 dual partner: the band-0 member of the dual class, i.e. 1 - nu"""
    value = nu_value(nu)
    if value >= 1:
        raise DomainError(
            f"dual_filling is defined on 0 < nu < 1, got {value}; "
            "use class_members(dual_class(class_from_nu(nu)), ...) for higher bands"
        )
    return class_members(dual_class(class_from_nu(value)), 1)[0]


def dual_in_band(nu: NuLike) -> FillingFactor:
    """Dual partner of a non-integer filling factor inside its own band

    The dual class has exactly one member per band; for nu in (k, k + 1) it is
    2k + 1 - nu.
    """
    value = nu_value(nu)
    if value.denominator == 1:
        raise DomainError(f"integer filling factor {value} lies on a band boundary")
    k = math.floor(value)
    return FillingFactor.of(2 * k + 1 - value)


def susy_partner_spin(s) -> Fraction:
    """Fractal supersymmetry partner s + 1/2 of a spin 0 < s < 1/2"""
    spin = Fraction(s)
    if not 0 < spin < HALF:
        raise DomainError(f"supersymmetric partner needs 0 < s < 1/2, got {spin}")
    return spin + HALF


def susy_pair_classes(s) -> Tuple[FractonClass, FractonClass]:
    """Classes of the pair (s, s + 1/2); they are always dual to each other"""
    partner = susy_partner_spin(s)
    return class_from_spin(s), class_from_spin(partner)


def class_of_spin(s) -> FractonClass:
    """h = 2 - 2s for 0 <= s <= 1/2"""
    spin = Fraction(s)
    if not 0 <= spin <= HALF:
        raise DomainError(f"h = 2 - 2s needs 0 <= s <= 1/2, got {spin}")
    return FractonClass(h=2 - 2 * spin)


def class_from_spin(s) -> FractonClass:
    """Class of any positive spin through the spin-statistics relation nu = 2s"""
    return class_from_nu(2 * Fraction(s))


def spin_members(fracton_class: FractonClass, count: int) -> List[Fraction]:
    """First `count` spins of a class, e.g. 1/4, 3/4, 5/4 for h = 3/2"""
    return [member.value / 2 for member in class_members(fracton_class, count)]


def parse_class_parameter(text: str) -> ClassParameter:
    """Read a class label: "3/2" or "2" stay exact, "1.5" becomes a float"""
    text = text.strip()
    try:
        if "/" in text or text.lstrip("+").isdigit():
            value = Fraction(text)
            FractonClass(h=value)
            return value
        value = float(text)
    except (ValueError, ZeroDivisionError) as e:
        raise DomainError(f"cannot read class parameter {text!r}: {e}") from e
    if not math.isfinite(value) or not 1 <= value <= 2:
        raise DomainError(f"h must lie in [1, 2], got {text}")
    return value


def as_float(h: HLike) -> float:
    """Narrow a class parameter to float, checking 1 <= h <= 2"""
    if isinstance(h, FractonClass):
        return h.to_float()
    if isinstance(h, bool):
        raise DomainError("h must be a number")
    value = float(h)
    if not math.isfinite(value) or not 1.0 <= value <= 2.0:
        raise DomainError(f"h must be finite and lie in [1, 2], got {h}")
    return value
