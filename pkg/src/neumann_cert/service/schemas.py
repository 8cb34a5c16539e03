"""Request/response models for the certification service.

The JSON shapes here mirror the canonical serialization of the core types
(potential files, certificates, suite reports) so documents produced by the
service round-trip through the CLI and back.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..certify import Partition
from ..potential import Potential

MethodName = Literal["auto", "classical", "dolph", "l1",
                     "linf-partition", "l1-partition", "greedy"]
FamilyName = Literal["minimizing", "step", "constant", "counterexample"]
BoundaryName = Literal["neumann", "mixed_dn", "mixed_nd"]


class PotentialModel(BaseModel):
    """A potential document: piecewise-constant cells or a sampled profile."""

    model_config = ConfigDict(extra="forbid")

    L: float = Field(gt=0.0, description="domain length")
    kind: Literal["piecewise_constant", "sampled"]
    values: list[float]
    breakpoints: Optional[list[float]] = Field(
        default=None, description="cell edges, piecewise-constant form only")
    grid: Optional[list[float]] = Field(
        default=None, description="sample abscissae, sampled form only")
    interpolation: Optional[Literal["linear"]] = Field(
        default=None, description="sampled form only; linear is the only mode")

    @model_validator(mode="after")
    def _consistent(self) -> "PotentialModel":
        if self.kind == "piecewise_constant":
            if self.breakpoints is None:
                raise ValueError("piecewise_constant potential needs breakpoints")
            if self.grid is not None or self.interpolation is not None:
                raise ValueError("grid/interpolation fields belong to the sampled form")
            if len(self.breakpoints) != len(self.values) + 1:
                raise ValueError("need exactly one more breakpoint than cell values")
        else:
            if self.grid is None:
                raise ValueError("sampled potential needs a grid")
            if self.breakpoints is not None:
                raise ValueError("breakpoints belong to the piecewise-constant form")
            if len(self.grid) != len(self.values):
                raise ValueError("grid and values must have equal length")
        return self

    def to_potential(self) -> Potential:
        if self.kind == "piecewise_constant":
            return Potential.piecewise_constant(self.breakpoints, self.values, self.L)
        return Potential.sampled(self.grid, self.values, self.L)

    @classmethod
    def from_potential(cls, a: Potential) -> "PotentialModel":
        return cls(**a.to_json_dict())


class PartitionModel(BaseModel):
    """A certification partition 0 = y_0 < ... < y_{2n+2} = L."""

    model_config = ConfigDict(extra="forbid")

    n: int = Field(ge=1)
    points: list[float]

    def to_partition(self) -> Partition:
        return Partition(self.n, self.points)


class CertificateModel(BaseModel):
    verdict: Literal["UniqueTrivial", "ResonantWitness", "Inconclusive"]
    method: Optional[str] = None
    n: Optional[int] = None
    partition: Optional[list[float]] = None
    margins: dict[str, float] = Field(default_factory=dict)
    tolerances: dict[str, float] = Field(default_factory=dict)
    assumptions: list[str] = Field(default_factory=list)


class CertifyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    potential: PotentialModel
    n: int = Field(default=1, ge=0, description="eigenvalue level")
    method: MethodName = "auto"
    partition: Optional[PartitionModel] = Field(
        default=None, description="required by the fixed-partition methods")
    eps: Optional[float] = Field(
        default=None, gt=0.0, description="greedy excess-rate offset override")


class SpectrumRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    potential: PotentialModel
    fd_grid: int = Field(default=800, ge=200, le=20_000)
    bc: BoundaryName = "neumann"
    include_trajectory: bool = True


class TrajectoryPoint(BaseModel):
    x: float
    u: float
    du: float
    theta: float


class SpectrumResponse(BaseModel):
    residual: float = Field(description="scaled Neumann shooting residual u'(L)")
    indicator: float = Field(description="min |eigenvalue| of the discretization")
    resonant: bool = Field(description="residual within the resonance tolerance")
    eigenvalues_near_zero: list[float] = Field(
        description="the five discretization eigenvalues closest to zero")
    trajectory: Optional[list[TrajectoryPoint]] = None


class ConstructRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    family: FamilyName
    n: int = Field(default=1, ge=1)
    L: float = Field(default=1.0, gt=0.0)
    eps: Optional[float] = Field(default=None, gt=0.0)
    q: Optional[int] = Field(default=None, ge=1,
                             description="half-wave count, constant family only")
    partition: Optional[PartitionModel] = None


class SolutionModel(BaseModel):
    """Closed-form nontrivial solution: exact piece descriptors."""

    L: float
    name: str
    breakpoints: list[float]
    pieces: list[dict]


class ConstructResponse(BaseModel):
    potential: PotentialModel
    solution: Optional[SolutionModel] = None
    diagnostics: dict[str, float] = Field(default_factory=dict)


class VerifyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    suite: str
    seed: int = 0


class SuiteReportModel(BaseModel):
    suite: str
    seed: int
    cases: int
    passed: bool
    failures: list[dict] = Field(default_factory=list)
    metrics: dict[str, float] = Field(default_factory=dict)


class ConstantsResponse(BaseModel):
    n: int
    L: float
    lambda_n: float
    lambda_next: float
    mu_n: float
    beta1: float
    beta_inf: float


class HealthResponse(BaseModel):
    status: str
    version: str
