"""FastAPI service wrapping the solver core.

Endpoint handlers are plain functions over the pydantic schemas, so the CLI
can call them in-process; over HTTP, core validation errors surface as 400s
via the registered exception handlers.
"""

from __future__ import annotations

import dataclasses
import time

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..bench import (
    ExperimentSpec,
    fit_exponential,
    run_experiment,
    solve_exact_original,
    trivial_initial,
)
from ..colgen import CgConfig, run_cg
from ..instance import InstanceFormatError, generate_random
from ..postprocess import PpConfig, postprocess, round_solution
from ..qubo import CapacityError, SaConfig
from .models import (
    BenchRequest,
    BenchResponse,
    ExactRequest,
    ExactResponse,
    FitRequest,
    FitResponse,
    GenerateRequest,
    HealthResponse,
    InstanceModel,
    RecordModel,
    SolveRequest,
    SolveResponse,
)

app = FastAPI(title="cgqp solver service", version=__version__)


@app.exception_handler(InstanceFormatError)
@app.exception_handler(CapacityError)
@app.exception_handler(ValueError)
async def _bad_request(request: Request, exc: Exception) -> JSONResponse:
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/generate", response_model=InstanceModel)
def generate(req: GenerateRequest) -> InstanceModel:
    return InstanceModel.from_instance(generate_random(req.n, req.m, req.seed))


@app.post("/solve", response_model=SolveResponse)
def solve(req: SolveRequest) -> SolveResponse:
    """Full pipeline: column generation, rounding, postprocessing."""
    inst = req.instance.to_instance()
    sa = SaConfig(num_reads=req.sa_reads, sweeps_per_read=req.sa_sweeps,
                  beta_initial=req.sa_beta_initial, beta_final=req.sa_beta_final,
                  seed=req.seed)
    cg_cfg = CgConfig(pricing_backend=req.pricing, rc_tolerance=req.rc_tolerance,
                      max_iterations=req.max_iterations, sa_config=sa)
    initial = req.initial if req.initial else [trivial_initial(inst.n)]

    t0 = time.perf_counter()
    cg = run_cg(inst, initial, cg_cfg)
    t_cg = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    pp = postprocess(inst, round_solution(cg.X),
                     PpConfig(alpha_f=req.alpha_f, alpha_l=req.alpha_l,
                              max_flips=req.max_flips))
    t_pp = (time.perf_counter() - t0) * 1e3

    return SolveResponse(
        solution=None if pp.x is None else [int(v) for v in pp.x],
        objective=pp.objective,
        feasible=pp.feasible,
        relax_obj=cg.relax_obj,
        cg_iterations=cg.iterations,
        cg_termination=cg.termination,
        restoration_flips=pp.restoration_flips,
        optimization_flips=pp.optimization_flips,
        time_cg_ms=t_cg,
        time_pp_ms=t_pp,
        time_total_ms=t_cg + t_pp,
    )


@app.post("/exact", response_model=ExactResponse)
def exact(req: ExactRequest) -> ExactResponse:
    res = solve_exact_original(req.instance.to_instance())
    if not res.feasible_exists:
        return ExactResponse(e_star=None, x_star=None, feasible_exists=False)
    return ExactResponse(e_star=res.e_star, x_star=[int(v) for v in res.x_star],
                         feasible_exists=True)


@app.post("/bench", response_model=BenchResponse)
def bench(req: BenchRequest) -> BenchResponse:
    spec = ExperimentSpec(
        n_values=req.n_list,
        ratio_values=req.ratio_list,
        instances_per_cell=req.instances,
        base_seed=req.seed,
        methods=tuple(req.methods),
        pp=PpConfig(alpha_f=req.alpha_f, alpha_l=req.alpha_l, max_flips=req.max_flips),
        cg=CgConfig(rc_tolerance=req.rc_tolerance, max_iterations=req.max_iterations,
                    sa_config=SaConfig(num_reads=req.sa_reads, sweeps_per_read=req.sa_sweeps,
                                       beta_initial=req.sa_beta_initial,
                                       beta_final=req.sa_beta_final)),
    )
    records = run_experiment(spec, jobs=req.jobs)
    return BenchResponse(records=[RecordModel(**dataclasses.asdict(r)) for r in records])


@app.post("/fit", response_model=FitResponse)
def fit(req: FitRequest) -> FitResponse:
    a, b = fit_exponential(req.points)
    return FitResponse(a=a, b=b)
