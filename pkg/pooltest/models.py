"""Domain types shared by the services and the renderers."""
import math
from enum import Enum
from typing import List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from pooltest.errors import DomainError


MAX_SEED = 2**64 - 1


class SchemeId(str, Enum):
    D0 = "D0"
    D = "D"
    S = "S"


class OptimalMethod(str, Enum):
    BRUTE_FORCE = "brute_force"
    CLOSED_FORM = "closed_form"
    CONTINUOUS = "continuous"


class Prevalence(BaseModel):
    """Defect probability p with the derived q = 1 - p and ln q."""

    model_config = ConfigDict(frozen=True)

    p: float = Field(gt=0.0, lt=1.0)

    @computed_field
    @property
    def q(self) -> float:
        return 1.0 - self.p

    @computed_field
    @property
    def log_q(self) -> float:
        return math.log1p(-self.p)


PrevalenceLike = Union[float, Prevalence]


def as_prevalence(p: PrevalenceLike) -> Prevalence:
    if isinstance(p, Prevalence):
        return p
    value = float(p)
    if not 0.0 < value < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p!r}")
    return Prevalence(p=value)


def as_scheme(scheme: Union[str, SchemeId]) -> SchemeId:
    try:
        return SchemeId(scheme)
    except ValueError as exc:
        raise DomainError(f"unknown scheme {scheme!r}; expected one of D0, D, S") from exc


class CostPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    scheme: SchemeId
    n: Union[int, float]
    p: float
    t: float


class OptimalConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    scheme: SchemeId
    p: float
    n_opt: int = Field(ge=1)
    t_opt: float
    candidates: List[int] = Field(min_length=1)
    method: OptimalMethod

    @model_validator(mode="after")
    def _n_opt_is_candidate(self) -> "OptimalConfig":
        if self.n_opt not in self.candidates:
            raise ValueError(f"n_opt={self.n_opt} is not among the candidates")
        return self


class RootFindResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    x: float
    residual: float
    iterations: int
    bracket: Tuple[float, float]
    # final bracket width; larger than xtol when f hit an exact zero
    width: float


class SimulationEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    scheme: SchemeId
    n: int
    p: float
    mean: float
    std_error: float = Field(ge=0.0)
    replications: int = Field(ge=1)
    seed: int = Field(ge=0, le=MAX_SEED)


class GridSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    lo: float
    hi: float
    count: int
    spacing: str

    def describe(self) -> str:
        return f"{self.spacing}[{self.lo:.12g}, {self.hi:.12g}]x{self.count}"


class VerificationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    claim_id: str
    grid: GridSpec
    passed: bool
    worst_margin: float
    worst_location: float
    sign_changes: Optional[int] = None

    @computed_field
    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"
