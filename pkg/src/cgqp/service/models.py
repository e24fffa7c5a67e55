"""Request/response schemas for the solver service.

InstanceModel mirrors the on-disk instance format: coefficients as 1-based
[i, j, value] triples over the upper triangle, missing entries meaning zero.
Semantic validation (index ranges, duplicates, b length) happens in the core
codec, not here.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

from ..instance import ProblemInstance, instance_from_dict, instance_to_dict

Method = Literal["cg_exact_pp", "cg_sa_pp", "random_pp"]


class InstanceModel(BaseModel):
    n: int
    m: int
    b: list[float]
    Q: list[tuple[int, int, float]]
    A: list[list[tuple[int, int, float]]]

    def to_instance(self) -> ProblemInstance:
        return instance_from_dict(self.model_dump())

    @classmethod
    def from_instance(cls, inst: ProblemInstance) -> "InstanceModel":
        return cls.model_validate(instance_to_dict(inst))


class GenerateRequest(BaseModel):
    n: int = Field(ge=1)
    m: int = Field(ge=0)
    seed: int = Field(default=0, ge=0)


class SolveRequest(BaseModel):
    instance: InstanceModel
    pricing: Literal["exact", "sa"] = "exact"
    alpha_f: float = 0.1
    alpha_l: float = 0.9
    max_flips: int = 1000
    seed: int = 0
    sa_reads: int = 20
    sa_sweeps: int = 1000
    sa_beta_initial: float = 0.1
    sa_beta_final: float = 10.0
    rc_tolerance: float = 1e-9
    max_iterations: int = 200
    initial: list[list[int]] | None = None


class SolveResponse(BaseModel):
    solution: list[int] | None
    objective: float | None
    feasible: bool
    relax_obj: float
    cg_iterations: int
    cg_termination: str
    restoration_flips: int
    optimization_flips: int
    time_cg_ms: float
    time_pp_ms: float
    time_total_ms: float


class ExactRequest(BaseModel):
    instance: InstanceModel


class ExactResponse(BaseModel):
    e_star: float | None
    x_star: list[int] | None
    feasible_exists: bool


class BenchRequest(BaseModel):
    n_list: list[int]
    ratio_list: list[float]
    instances: int = Field(default=1, ge=1)
    seed: int = 0
    methods: list[Method] = ["cg_exact_pp", "random_pp"]
    alpha_f: float = 0.1
    alpha_l: float = 0.9
    max_flips: int = 1000
    sa_reads: int = 20
    sa_sweeps: int = 1000
    sa_beta_initial: float = 0.1
    sa_beta_final: float = 10.0
    rc_tolerance: float = 1e-9
    max_iterations: int = 200
    jobs: int = Field(default=1, ge=1)


class RecordModel(BaseModel):
    n: int
    m: int
    ratio: float
    seed: int
    method: str
    relax_obj: float | None
    E: float | None
    E_star: float | None
    relative_error: float | None
    hamming: float | None
    feasible: bool
    cg_iterations: int | None
    cg_termination: str | None
    restoration_flips: int | None
    optimization_flips: int | None
    time_cg_ms: float | None
    time_pp_ms: float | None
    time_total_ms: float | None


class BenchResponse(BaseModel):
    records: list[RecordModel]


class FitRequest(BaseModel):
    points: list[tuple[float, float]]


class FitResponse(BaseModel):
    a: float
    b: float


class HealthResponse(BaseModel):
    status: str
    version: str
