import math
from fractions import Fraction

import pytest

from fracton.models import FractonClass


@pytest.fixture
def fermion() -> FractonClass:
    return FractonClass(h=1)


@pytest.fixture
def semion() -> FractonClass:
    return FractonClass(h=Fraction(3, 2))


@pytest.fixture
def boson() -> FractonClass:
    return FractonClass(h=2)


@pytest.fixture
def semion_amplitude_file(tmp_path):
    """The six h = 3/2 kets of 3 modes and 4 particles with equal amplitudes"""
    amplitude = 1 / math.sqrt(6)
    lines = ["# h = 3/2, 3 modes, 4 particles"]
    lines += [f"{ket} {amplitude!r} 0.0" for ket in ("121", "022", "211", "202", "112", "220")]
    path = tmp_path / "semion.txt"
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def fermion_amplitude_file(tmp_path):
    amplitude = 1 / math.sqrt(3)
    path = tmp_path / "fermion.txt"
    path.write_text("".join(f"{ket} {amplitude!r} 0\n" for ket in ("110", "101", "011")))
    return path
