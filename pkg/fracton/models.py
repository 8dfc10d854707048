import math
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeInt,
    PositiveInt,
    field_serializer,
    field_validator,
    model_validator,
)

from fracton.exceptions import DomainError

ClassParameter = Union[Fraction, float]

SMALLEST_NORMAL = float(np.finfo(float).tiny)


def _to_fraction(value) -> Fraction:
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise ValueError(f"expected an exact rational, got {type(value).__name__}")


class FractonClass(BaseModel):
    """Universal class labelled by its Hausdorff dimension 1 <= h <= 2"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    h: Fraction

    @field_validator("h", mode="before")
    @classmethod
    def _coerce_h(cls, value):
        return _to_fraction(value)

    @field_validator("h")
    @classmethod
    def _check_range(cls, value: Fraction) -> Fraction:
        if not 1 <= value <= 2:
            raise ValueError(f"h must lie in [1, 2], got {value}")
        return value

    @field_serializer("h")
    def _serialize_h(self, value: Fraction) -> str:
        return str(value)

    @property
    def spin(self) -> Fraction:
        """s = (2 - h)/2, in [0, 1/2]"""
        return (2 - self.h) / 2

    @property
    def base_nu(self) -> Fraction:
        """Band-0 statistical parameter nu = 2 - h"""
        return 2 - self.h

    @property
    def cap(self) -> Optional[int]:
        """Per-mode occupation cap 1/(2 - h) when it is a positive integer"""
        if self.h == 2:
            return None
        cap = 1 / (2 - self.h)
        return int(cap) if cap.denominator == 1 else None

    @property
    def is_boundary(self) -> bool:
        return self.h in (1, 2)

    @property
    def label(self) -> str:
        return str(self.h)

    def to_float(self) -> float:
        return float(self.h)

    def __str__(self) -> str:
        return self.label


class FillingFactor(BaseModel):
    """Positive rational nu = numerator/denominator, always stored reduced"""
    model_config = ConfigDict(frozen=True)

    numerator: PositiveInt
    denominator: PositiveInt

    @model_validator(mode="before")
    @classmethod
    def _reduce(cls, data):
        if isinstance(data, dict):
            num, den = data.get("numerator"), data.get("denominator")
            if isinstance(num, int) and isinstance(den, int) and den != 0:
                divisor = math.gcd(num, den)
                if divisor > 1:
                    data = {**data, "numerator": num // divisor, "denominator": den // divisor}
        return data

    @classmethod
    def of(cls, value) -> "FillingFactor":
        """Build from a Fraction, int or a "p/q" string"""
        fraction = _to_fraction(value)
        if fraction <= 0:
            raise DomainError(f"filling factor must be positive, got {fraction}")
        return cls(numerator=fraction.numerator, denominator=fraction.denominator)

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def band(self) -> int:
        """Index k of the band (k, k + 1) containing nu"""
        return self.numerator // self.denominator

    @property
    def is_integer(self) -> bool:
        return self.denominator == 1

    def __lt__(self, other: "FillingFactor") -> bool:
        return self.value < other.value

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"


class StatisticalPoint(BaseModel):
    """Energy, chemical potential and temperature of one single-particle state"""
    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(allow_inf_nan=False)
    mu: float = Field(allow_inf_nan=False)
    kT: float = Field(gt=0, allow_inf_nan=False)

    @property
    def reduced_energy(self) -> float:
        """(epsilon - mu)/kT, i.e. ln xi"""
        return (self.epsilon - self.mu) / self.kT

    @property
    def xi(self) -> float:
        try:
            return math.exp(self.reduced_energy)
        except OverflowError as e:
            raise DomainError(f"xi overflows for (epsilon - mu)/kT = {self.reduced_energy}") from e


class SolverPoint(BaseModel):
    """Solved single-particle state at one fugacity"""
    model_config = ConfigDict(frozen=True)

    xi: float = Field(gt=0)
    log_xi: float
    h: float = Field(ge=1, le=2)
    log_offset: float = Field(allow_inf_nan=False, description="t = ln(Y - 2), the solver variable")
    offset: float = Field(ge=0, description="Y - 2 = e^t; 0 once it underflows and n sits on the cap")
    Y: float
    n: float = Field(gt=0)
    theta: float
    p: float
    q: float
    method: Literal["closed-form", "bisection-newton"]
    iterations: int = 0
    residual: float = 0.0
    converged: bool = True


class WeightParams(BaseModel):
    """G states holding N particles of class h"""
    model_config = ConfigDict(frozen=True)

    G: PositiveInt
    N: NonNegativeInt
    h: float = Field(ge=1, le=2, allow_inf_nan=False)

    @property
    def n(self) -> float:
        return self.N / self.G

    @property
    def x(self) -> float:
        return float(self.N)

    @property
    def y(self) -> float:
        return self.G + (self.N - 1) * (self.h - 1) - self.N

    @property
    def feasible(self) -> bool:
        return self.y >= 0


class OccupationState(BaseModel):
    """Per-mode occupation counts |n1 n2 ... nk>"""
    model_config = ConfigDict(frozen=True)

    counts: Tuple[NonNegativeInt, ...] = Field(min_length=1)

    @classmethod
    def parse(cls, label: str) -> "OccupationState":
        """Parse "121" (one digit per mode) or "1,2,1" """
        text = label.strip().strip("|>")
        parts = text.split(",") if "," in text else list(text)
        if not parts or not all(part.strip().isdigit() for part in parts):
            raise DomainError(f"invalid occupation string {label!r}")
        return cls(counts=tuple(int(part) for part in parts))

    @property
    def modes(self) -> int:
        return len(self.counts)

    @property
    def particles(self) -> int:
        return sum(self.counts)

    @property
    def label(self) -> str:
        if all(count < 10 for count in self.counts):
            return "".join(str(count) for count in self.counts)
        return ",".join(str(count) for count in self.counts)

    @property
    def ket(self) -> str:
        return f"|{self.label}>"

    def __str__(self) -> str:
        return self.label


class AmplitudeVector(BaseModel):
    """Complex amplitudes c_i over a basis of occupation states"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    states: Tuple[OccupationState, ...]
    amplitudes: Tuple[complex, ...]

    @field_validator("amplitudes", mode="before")
    @classmethod
    def _coerce_amplitudes(cls, value):
        return tuple(complex(c) for c in value)

    @model_validator(mode="after")
    def _check_shape(self) -> "AmplitudeVector":
        if len(self.states) != len(self.amplitudes):
            raise ValueError(
                f"{len(self.states)} states but {len(self.amplitudes)} amplitudes"
            )
        if len(set(self.states)) != len(self.states):
            raise ValueError("basis states must be distinct")
        return self

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(np.asarray(self.amplitudes, dtype=complex)) ** 2

    @property
    def norm_squared(self) -> float:
        return float(self.probabilities.sum())


class TransitionGraph(BaseModel):
    """Filling factors of one band joined by unimodular transitions"""
    model_config = ConfigDict(frozen=True)

    band: NonNegativeInt
    max_denominator: PositiveInt
    vertices: List[FillingFactor]
    edges: List[Tuple[FillingFactor, FillingFactor]]
    class_labels: Dict[str, FractonClass]

    @model_validator(mode="after")
    def _check_graph(self) -> "TransitionGraph":
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("vertices must be distinct")
        for a, b in self.edges:
            if abs(b.numerator * a.denominator - a.numerator * b.denominator) != 1:
                raise ValueError(f"edge ({a}, {b}) is not unimodular")
        return self

    def class_of(self, nu: FillingFactor) -> FractonClass:
        return self.class_labels[str(nu)]


class OccupationRow(BaseModel):
    """One (h, nu, n) row of the lowest-Landau-level occupation table"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    h: FractonClass
    nu: FillingFactor
    n: Fraction

    @field_serializer("n")
    def _serialize_n(self, value: Fraction) -> str:
        return str(value)


class DualPair(BaseModel):
    model_config = ConfigDict(frozen=True)

    nu: FillingFactor
    dual: FillingFactor
    h: FractonClass
    dual_h: FractonClass


class EntropyForms(BaseModel):
    """The three equivalent entropy expressions at one solved point, in nats"""
    model_config = ConfigDict(frozen=True)

    n: float = Field(gt=0)
    from_n: float
    from_Y: float
    from_pq: float

    @property
    def spread(self) -> float:
        """Largest disagreement relative to S

        Once S drops below the smallest normal double, e^t has underflowed and
        n equals the cap 1/(2 - h); S then carries no significant digits and the
        disagreement is measured against n instead.
        """
        values = (self.from_n, self.from_Y, self.from_pq)
        scale = max(abs(v) for v in values)
        if scale < SMALLEST_NORMAL:
            scale = self.n
        return (max(values) - min(values)) / scale


class TermContribution(BaseModel):
    state: str
    amplitude_re: float
    amplitude_im: float
    probability: float
    bits: float


class StateReport(BaseModel):
    h: str
    modes: int
    particles: int
    basis_size: int
    total_entanglement_bits: float
    per_term: List[TermContribution]


class CheckResult(BaseModel):
    """Outcome of one verification check"""
    module: str
    name: str
    status: Literal["PASS", "FAIL", "INFO"]
    detail: str = ""


class GridSpec(BaseModel):
    """min,max,count[,linear|log] sweep specification"""
    model_config = ConfigDict(frozen=True)

    start: float = Field(allow_inf_nan=False)
    stop: float = Field(allow_inf_nan=False)
    count: PositiveInt
    scale: Literal["linear", "log"] = "linear"

    @model_validator(mode="after")
    def _check_grid(self) -> "GridSpec":
        if self.count == 1:
            if self.start != self.stop:
                raise ValueError("a single-point grid needs min == max")
        elif not self.start < self.stop:
            raise ValueError(f"grid needs min < max, got {self.start} >= {self.stop}")
        if self.scale == "log" and self.start <= 0:
            raise ValueError("log grids need min > 0")
        return self

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        parts = [part.strip() for part in text.split(",")]
        if len(parts) not in (3, 4):
            raise ValueError(f"grid must be min,max,count[,linear|log], got {text!r}")
        scale = parts[3] if len(parts) == 4 else "linear"
        return cls(start=float(parts[0]), stop=float(parts[1]), count=int(parts[2]), scale=scale)

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.start])
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)


class RunConfig(BaseModel):
    """Resolved command-line configuration of one subcommand run"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    subcommand: Literal["distribution", "entanglement", "state", "farey", "verify", "classes"]
    classes: List[ClassParameter] = Field(default_factory=list)
    class_labels: List[str] = Field(default_factory=list)
    grid: Optional[GridSpec] = None
    points: List[float] = Field(default_factory=list)
    grid_variable: Literal["xi", "x"] = "xi"
    output: Optional[Path] = None
    output_format: Literal["csv", "json", "dot", "text"] = "csv"
    modes: Optional[PositiveInt] = None
    particles: Optional[NonNegativeInt] = None
    amplitudes: Optional[Path] = None
    max_denominator: Optional[PositiveInt] = None
    band: NonNegativeInt = 0
    bands: PositiveInt = 3
    pairs_output: Optional[Path] = None
    table_output: Optional[Path] = None
    only: List[str] = Field(default_factory=list)
    solver_tolerance: Optional[float] = Field(default=None, gt=0)
