from typing import Optional


class FractonError(Exception):
    """Base class for every error raised by the package"""


class DomainError(FractonError, ValueError):
    """An argument lies outside the domain where the formula is defined"""


class BoseDivergenceError(DomainError):
    """h = 2 with xi <= 1, i.e. mu >= epsilon for bosons"""


class InfeasibleOccupancyError(DomainError):
    """N particles do not fit into G states for the class (y < 0)"""


class UnsupportedClassError(DomainError):
    """The class has no integer per-mode cap 1/(2 - h)"""


class OccupationDivergenceError(DomainError):
    """The occupation number is infinite (h = 2 or an even filling factor)"""


class NormalizationError(DomainError):
    """Amplitudes are not normalized within tolerance"""


class AmplitudeFileError(DomainError):
    """A line of an amplitude file cannot be accepted"""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class ConvergenceError(FractonError, ArithmeticError):
    """The root finder hit its iteration limit"""


class UsageError(FractonError):
    """Invalid command-line or grid specification"""
