"""Request and response models for the service and the CLI.

Schedules and weight maps arrive as tagged unions on a ``kind`` field,
mirroring the engine's config dictionaries, so a trace's embedded config
round-trips through these models unchanged.
"""

from __future__ import annotations

from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, Field, model_validator

from .. import urn_core


class LinearSpec(BaseModel):
    kind: Literal["linear"] = "linear"
    rho: float = Field(gt=0)
    rho_tilde: float = 0.0

    @model_validator(mode="after")
    def _positive_first_weight(self):
        if not self.rho + self.rho_tilde > 0:
            raise ValueError("rho + rho_tilde must be positive")
        return self

    def to_domain(self) -> urn_core.Linear:
        return urn_core.Linear(self.rho, self.rho_tilde)


class PowerRootSpec(BaseModel):
    kind: Literal["power_root"] = "power_root"
    rho: float = Field(gt=1)

    def to_domain(self) -> urn_core.PowerRoot:
        return urn_core.PowerRoot(self.rho)


class TabulatedSpec(BaseModel):
    kind: Literal["tabulated"] = "tabulated"
    values: list[float] = Field(min_length=1)

    def to_domain(self) -> urn_core.Tabulated:
        return urn_core.Tabulated(tuple(self.values))


UpdateSpec = Annotated[Union[LinearSpec, PowerRootSpec, TabulatedSpec],
                       Field(discriminator="kind")]


class ConstantSpec(BaseModel):
    kind: Literal["constant"] = "constant"
    p: float = Field(gt=0, lt=1)

    def to_domain(self) -> urn_core.Constant:
        return urn_core.Constant(self.p)


class PowerLawSpec(BaseModel):
    kind: Literal["power_law"] = "power_law"
    theta: float = Field(gt=0, lt=1)
    scale: float = Field(default=1.0, gt=0)
    clamp: float = Field(default=urn_core.DEFAULT_CLAMP, gt=0, lt=1)

    def to_domain(self) -> urn_core.PowerLaw:
        return urn_core.PowerLaw(self.theta, self.scale, self.clamp)


class HarmonicSpec(BaseModel):
    kind: Literal["harmonic"] = "harmonic"
    scale: float = Field(default=1.0, gt=0)
    clamp: float = Field(default=urn_core.DEFAULT_CLAMP, gt=0, lt=1)

    def to_domain(self) -> urn_core.Harmonic:
        return urn_core.Harmonic(self.scale, self.clamp)


class GeometricSpec(BaseModel):
    kind: Literal["geometric"] = "geometric"
    ratio: float = Field(gt=0, lt=1)
    scale: float = Field(default=1.0, gt=0)
    clamp: float = Field(default=urn_core.DEFAULT_CLAMP, gt=0, lt=1)

    def to_domain(self) -> urn_core.Geometric:
        return urn_core.Geometric(self.ratio, self.scale, self.clamp)


class ExplicitSpec(BaseModel):
    kind: Literal["explicit"] = "explicit"
    probs: list[float] = Field(min_length=1)

    def to_domain(self) -> urn_core.Explicit:
        return urn_core.Explicit(tuple(self.probs))


ScheduleSpec = Annotated[Union[ConstantSpec, PowerLawSpec, HarmonicSpec,
                               GeometricSpec, ExplicitSpec],
                         Field(discriminator="kind")]


def schedule_spec_from_config(data: dict) -> ScheduleSpec:
    return _ScheduleHolder(schedule=data).schedule


def update_spec_from_config(data: dict) -> UpdateSpec:
    return _UpdateHolder(update=data).update


class _ScheduleHolder(BaseModel):
    schedule: ScheduleSpec


class _UpdateHolder(BaseModel):
    update: UpdateSpec


# ---------------------------------------------------------------------------
# simulate


class SimulateRequest(BaseModel):
    schedule: ScheduleSpec
    update: UpdateSpec = LinearSpec(rho=1.0, rho_tilde=0.0)
    horizon: int = Field(ge=1, le=100_000_000)
    seed: int = 0
    replications: int = Field(default=1, ge=1, le=10_000)
    tracked_colors: Optional[list[int]] = None
    checkpoints_per_decade: int = Field(default=64, ge=1, le=1000)
    capture_history: Optional[bool] = None
    max_colors: Optional[int] = Field(default=None, ge=1)
    threads: Optional[int] = Field(default=None, ge=1)
    include_traces: bool = False
    transient: Optional[float] = Field(default=None, gt=0)
    rank_floor: int = Field(default=20, ge=1)
    shift: Optional[float] = None

    def to_config(self) -> urn_core.SimulationConfig:
        return urn_core.SimulationConfig(
            schedule=self.schedule.to_domain(),
            update=self.update.to_domain(),
            horizon=self.horizon,
            seed=self.seed,
            tracked_colors=tuple(self.tracked_colors)
            if self.tracked_colors is not None else None,
            checkpoints_per_decade=self.checkpoints_per_decade,
            capture_history=self.capture_history,
            max_colors=self.max_colors,
        )


class RunSummary(BaseModel):
    replication: int
    num_colors: int
    estimates: Optional[dict] = None
    estimate_error: Optional[str] = None


class SimulateResponse(BaseModel):
    replications: int
    horizon: int
    seed: int
    runs: list[RunSummary]
    pooled: Optional[dict] = None
    prediction: dict
    regime: dict
    traces: Optional[list[dict]] = None


# ---------------------------------------------------------------------------
# exact


class ColorsPmfRequest(BaseModel):
    quantity: Literal["colors_pmf"] = "colors_pmf"
    n: int = Field(ge=1, le=100_000)
    p: float = Field(gt=0, lt=1)


class MeanColorsRequest(BaseModel):
    quantity: Literal["mean_colors"] = "mean_colors"
    n: int = Field(ge=1)
    p: float = Field(gt=0, lt=1)


class AbsentRequest(BaseModel):
    quantity: Literal["absent"] = "absent"
    n: int = Field(ge=2)
    c: int = Field(ge=2)
    p: float = Field(gt=0, lt=1)


class ExpectedCountRequest(BaseModel):
    quantity: Literal["expected_count"] = "expected_count"
    n: int = Field(ge=1)
    c: int = Field(ge=1)
    p: float = Field(gt=0, lt=1)


class Color1Request(BaseModel):
    quantity: Literal["color1"] = "color1"
    n: int = Field(ge=1)
    p: float = Field(gt=0, lt=1)


class PrefactorRequest(BaseModel):
    quantity: Literal["prefactor"] = "prefactor"
    c: int = Field(ge=2)
    p: float = Field(gt=0, lt=1)


class LambdaRequest(BaseModel):
    quantity: Literal["lambda"] = "lambda"
    c: int = Field(ge=2)
    p: float = Field(gt=0, lt=1)
    upto: Optional[int] = Field(default=None, ge=2)
    tolerance: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _one_mode(self):
        if (self.upto is None) == (self.tolerance is None):
            raise ValueError("give exactly one of upto or tolerance")
        return self


class DynamicColor1Request(BaseModel):
    quantity: Literal["dynamic_color1"] = "dynamic_color1"
    schedule: ScheduleSpec
    n: int = Field(ge=1)


ExactRequest = Annotated[Union[ColorsPmfRequest, MeanColorsRequest,
                               AbsentRequest, ExpectedCountRequest,
                               Color1Request, PrefactorRequest,
                               LambdaRequest, DynamicColor1Request],
                         Field(discriminator="quantity")]


class ExactRequestHolder(BaseModel):
    request: ExactRequest


class ExactResponse(BaseModel):
    """JSON record shape shared by all exact quantities."""

    formula: str
    params: dict
    value: Union[float, list[float], dict]
    error_bound: Optional[float] = None


# ---------------------------------------------------------------------------
# approx


class ApproxRequest(BaseModel):
    schedule: ScheduleSpec
    n: int = Field(ge=1, le=100_000_000)
    exact_tv: bool = False


class ApproxResponse(BaseModel):
    n: int
    lambda1: float
    lambda2: float
    tv_bound: float
    clt_mean: float
    clt_sd: float
    tv_exact: Optional[float] = None
    tv_uncertainty: Optional[float] = None


# ---------------------------------------------------------------------------
# analyze / fit


class AnalyzeRequest(BaseModel):
    trace: dict
    transient: Optional[float] = Field(default=None, gt=0)
    rank_floor: int = Field(default=20, ge=1)
    shift: Optional[float] = None


class AnalyzeResponse(BaseModel):
    estimates: dict
    spectrum: list[list[float]]
    rank: list[list[int]]
    dominance: dict
    prediction: dict
    regime: dict


class EventRecord(BaseModel):
    timestamp: int
    label: str = Field(min_length=1)


class FitRequest(BaseModel):
    events: list[EventRecord] = Field(min_length=1)
    top_m: int = Field(default=20, ge=1)
    checkpoints_per_decade: int = Field(default=64, ge=1, le=1000)
    transient: Optional[float] = Field(default=None, gt=0)
    rank_floor: int = Field(default=20, ge=1)
    shift: Optional[float] = None


class FitResponse(BaseModel):
    num_events: int
    num_labels: int
    reorder_count: int
    estimates: dict
    dominance: dict
    top_labels: list[str]


# ---------------------------------------------------------------------------
# oracle


class OracleRequest(BaseModel):
    n: int = Field(default=6, ge=2, le=8)
    p: float = Field(default=0.3, gt=0, lt=1)
    tolerance: float = Field(default=1e-10, gt=0)
    replications: Optional[int] = Field(default=None, ge=1000, le=1_000_000)
    seed: int = 0


class OracleCheck(BaseModel):
    name: str
    error: float
    tolerance: float
    passed: bool


class OracleResponse(BaseModel):
    passed: bool
    max_error: float
    checks: list[OracleCheck]
