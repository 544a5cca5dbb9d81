"""Request/response models for the service and the CLI config file.

The CLI's JSON config reuses these shapes, so one validation path
covers files and HTTP bodies. Rationals travel as "p/q" strings.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

from ..dynamics import ForceSchedule
from ..rational import parse_rational
from ..tables import StepProbabilityTable
from ..walk import LatticeConfig


class LatticeModel(BaseModel):
    tau: str = "1"
    c: str = "1"
    horizon: int = 0


class ScheduleModel(BaseModel):
    gamma: str
    steps: Optional[list[dict]] = None
    constant_f: Optional[list[str]] = None
    steps_count: Optional[int] = None


class TableSpec(BaseModel):
    """Where the probability table comes from.

    uniform:  all rows 1/7           (needs `rows`)
    constant: one row repeated       (needs `row`, `rows`)
    inline:   explicit wire format   (needs `table` = {"rows": [...]})
    forced:   row0 evolved through a schedule (needs `row0`, `schedule`)
    """

    source: Literal["uniform", "constant", "inline", "forced"] = "uniform"
    rows: Optional[int] = None
    row: Optional[list[str]] = None
    table: Optional[dict] = None
    row0: Optional[list[str]] = None
    schedule: Optional[ScheduleModel] = None


def to_lattice_config(model: LatticeModel) -> LatticeConfig:
    return LatticeConfig(
        tau=parse_rational(model.tau),
        c=parse_rational(model.c),
        horizon=model.horizon,
    )


def to_schedule(model: ScheduleModel) -> ForceSchedule:
    data: dict = {"gamma": model.gamma}
    if model.constant_f is not None:
        if model.steps_count is None:
            raise ValueError("constant_f needs steps_count")
        data["constant_f"] = model.constant_f
        data["steps_count"] = model.steps_count
    elif model.steps is not None:
        data["steps"] = model.steps
    else:
        raise ValueError("schedule needs either steps or constant_f")
    return ForceSchedule.from_json_dict(data)


def to_table(spec: TableSpec) -> StepProbabilityTable:
    if spec.source == "uniform":
        if not spec.rows:
            raise ValueError("uniform table needs a positive `rows` count")
        return StepProbabilityTable.uniform(spec.rows)
    if spec.source == "constant":
        if spec.row is None or not spec.rows:
            raise ValueError("constant table needs `row` and a positive `rows`")
        return StepProbabilityTable.constant(
            [parse_rational(v) for v in spec.row], spec.rows
        )
    if spec.source == "inline":
        if spec.table is None:
            raise ValueError('inline table needs `table` = {"rows": [...]}')
        return StepProbabilityTable.from_json_dict(spec.table)
    if spec.source == "forced":
        if spec.row0 is None or spec.schedule is None:
            raise ValueError("forced table needs `row0` and `schedule`")
        from ..dynamics import evolve_forced

        start = StepProbabilityTable([[parse_rational(v) for v in spec.row0]])
        return evolve_forced(start, to_schedule(spec.schedule))
    raise ValueError(f"unknown table source: {spec.source}")


# -- requests / responses ---------------------------------------------------

class MeasureRequest(BaseModel):
    table: TableSpec
    expression: str
    precision: int = 12
    disjoint_planes: bool = False


class MeasureResponse(BaseModel):
    exact: str
    decimal: str
    disjoint_planes: Optional[list[list[int]]] = None


class SimulateRequest(BaseModel):
    lattice: LatticeModel
    table: TableSpec
    steps: int
    replicas: int
    seed: int = 0
    precision: int = 12
    dump_trajectories: int = 0


class SimulateResponse(BaseModel):
    moments_csv: str
    exact_moments_csv: str
    trajectories_csv: Optional[str] = None
    final_mean: list[str]
    final_trace: str
    final_se_trace: str


class CheckItem(BaseModel):
    name: str
    passed: bool
    details: str = ""


class VerifyNewton1Request(BaseModel):
    lattice: LatticeModel
    table: TableSpec
    steps: int
    precision: int = 12


class VerifyNewton2Request(BaseModel):
    lattice: LatticeModel
    table: TableSpec
    schedule: ScheduleModel
    precision: int = 12


class VerifyResponse(BaseModel):
    passed: bool
    checks: list[CheckItem]
    beta_exact: Optional[str] = None
    beta_decimal: Optional[str] = None


class ConvergeRequest(BaseModel):
    c: str = "1"
    total_time: str = "1"
    n_list: list[int]
    row: Optional[list[str]] = None  # defaults to the uniform row
    replicas: int = 0
    seed: int = 0


class ConvergenceRowModel(BaseModel):
    n_steps: int
    tau: str
    exact_trace: str
    bound: str
    empirical_trace: Optional[float] = None
    se: Optional[float] = None


class ConvergeResponse(BaseModel):
    csv: str
    rows: list[ConvergenceRowModel]


class EventProbabilityRequest(BaseModel):
    table: TableSpec
    expression: str
    replicas: int = Field(default=10000, ge=1)
    seed: int = 0


class EventProbabilityResponse(BaseModel):
    exact: str
    estimate: float
    se: float
