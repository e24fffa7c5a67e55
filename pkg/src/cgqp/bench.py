"""Exact oracle, baselines, metrics, and the benchmark experiment harness.

The harness sweeps a grid of sizes and constraint ratios, generates seeded
random instances, runs the requested methods, and emits one record per
(instance, method) in a fixed CSV schema.  Seeds are derived so that any
record is reproducible in isolation:

    instance_seed  = SeedSequence((base_seed, n, ratio_index, instance_index))
    method streams = SeedSequence((instance_seed, salt))   # salt 1 = sa, 2 = random

with all SeedSequence outputs taken as a single uint64.
"""

from __future__ import annotations

import dataclasses
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .colgen import CgConfig, run_cg
from .instance import ProblemInstance, as_bits, code_to_bits, generate_random
from .postprocess import PpConfig, PpResult, postprocess, round_solution
from .qubo import CapacityError, SaConfig

ORACLE_LIMIT = 24

SA_SEED_SALT = 1
RANDOM_SEED_SALT = 2

METHODS = ("cg_exact_pp", "cg_sa_pp", "random_pp")

CSV_HEADER = ("n,m,ratio,seed,method,relax_obj,E,E_star,relative_error,hamming,"
              "feasible,cg_iterations,cg_termination,restoration_flips,"
              "optimization_flips,time_cg_ms,time_pp_ms,time_total_ms")


class UndefinedMetricError(ValueError):
    """Relative error is undefined because the exact optimum is zero."""


@dataclass
class ExactResult:
    e_star: float
    x_star: np.ndarray | None   # lexicographically smallest optimum
    feasible_exists: bool


def solve_exact_original(inst: ProblemInstance, limit: int = ORACLE_LIMIT) -> ExactResult:
    """Exact optimum of the constrained problem by Gray-code enumeration."""
    if inst.n > limit:
        raise CapacityError(f"n = {inst.n} exceeds oracle limit {limit}")
    q_diag, q_mirror = inst.q_parts
    a_diag, a_mirror = inst.a_parts
    e, code = _kernels.gray_min_feasible(q_diag, q_mirror, a_diag, a_mirror,
                                         inst.b, inst.n)
    if code < 0:
        return ExactResult(e_star=np.nan, x_star=None, feasible_exists=False)
    x = code_to_bits(int(code), inst.n)
    return ExactResult(e_star=inst.objective(x), x_star=x, feasible_exists=True)


def relative_error(E: float, E_star: float) -> float:
    if E_star == 0.0:
        raise UndefinedMetricError("exact optimum is zero; relative error undefined")
    return abs((E - E_star) / E_star)


def hamming_distance(x, x_star) -> float:
    a = as_bits(x)
    b = as_bits(x_star)
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    return float(np.count_nonzero(a != b)) / a.size


def random_bits(n: int, seed: int) -> np.ndarray:
    """Uniform random binary vector from a PCG64 stream (one fair bit each)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    return as_bits(rng.integers(0, 2, n).astype(np.uint8))


def random_baseline(inst: ProblemInstance, seed: int, pp: PpConfig | None = None) -> PpResult:
    """Postprocessing applied to a uniformly random initial solution."""
    return postprocess(inst, random_bits(inst.n, seed), pp or PpConfig())


@dataclass
class ExperimentSpec:
    n_values: list[int]
    ratio_values: list[float]
    instances_per_cell: int
    base_seed: int = 0
    methods: tuple[str, ...] = ("cg_exact_pp", "random_pp")
    pp: PpConfig = field(default_factory=PpConfig)
    cg: CgConfig = field(default_factory=CgConfig)
    oracle_limit: int = ORACLE_LIMIT

    def __post_init__(self):
        if self.instances_per_cell < 1:
            raise ValueError("instances_per_cell must be >= 1")
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}; choose from {METHODS}")


@dataclass
class InstanceRecord:
    n: int
    m: int
    ratio: float
    seed: int
    method: str
    relax_obj: float | None = None
    E: float | None = None
    E_star: float | None = None
    relative_error: float | None = None
    hamming: float | None = None
    feasible: bool = False
    cg_iterations: int | None = None
    cg_termination: str | None = None
    restoration_flips: int | None = None
    optimization_flips: int | None = None
    time_cg_ms: float | None = None
    time_pp_ms: float | None = None
    time_total_ms: float | None = None


def _derive_seed(*entropy) -> int:
    return int(np.random.SeedSequence(tuple(int(e) for e in entropy))
               .generate_state(1, dtype=np.uint64)[0])


def _cell_m(ratio: float, n: int) -> int:
    return max(1, round(ratio * n))


def trivial_initial(n: int) -> np.ndarray:
    """The default first column x0 = (1, 0, ..., 0)."""
    x = np.zeros(n, dtype=np.uint8)
    x[0] = 1
    return as_bits(x)


def _run_instance(spec: ExperimentSpec, n: int, ratio_idx: int, inst_idx: int) -> list[InstanceRecord]:
    ratio = spec.ratio_values[ratio_idx]
    m = _cell_m(ratio, n)
    seed = _derive_seed(spec.base_seed, n, ratio_idx, inst_idx)
    inst = generate_random(n, m, seed)

    oracle = None
    if n <= spec.oracle_limit:
        oracle = solve_exact_original(inst, limit=spec.oracle_limit)

    records = []
    for method in spec.methods:
        rec = InstanceRecord(n=n, m=m, ratio=ratio, seed=seed, method=method)
        if oracle is not None and oracle.feasible_exists:
            rec.E_star = oracle.e_star

        x_init = None
        if method == "random_pp":
            x_init = random_bits(n, _derive_seed(seed, RANDOM_SEED_SALT))
        else:
            cg_cfg = spec.cg
            if method == "cg_sa_pp":
                sa = cg_cfg.sa_config or SaConfig()
                sa = dataclasses.replace(sa, seed=_derive_seed(seed, SA_SEED_SALT))
                cg_cfg = dataclasses.replace(cg_cfg, pricing_backend="sa", sa_config=sa)
            else:
                cg_cfg = dataclasses.replace(cg_cfg, pricing_backend="exact")
            t0 = time.perf_counter()
            try:
                cg = run_cg(inst, [trivial_initial(n)], cg_cfg)
            except CapacityError:
                records.append(rec)
                continue
            rec.time_cg_ms = (time.perf_counter() - t0) * 1e3
            rec.relax_obj = cg.relax_obj
            rec.cg_iterations = cg.iterations
            rec.cg_termination = cg.termination
            x_init = round_solution(cg.X)

        if oracle is not None and oracle.feasible_exists:
            rec.hamming = hamming_distance(x_init, oracle.x_star)

        t0 = time.perf_counter()
        pp = postprocess(inst, x_init, spec.pp)
        rec.time_pp_ms = (time.perf_counter() - t0) * 1e3
        rec.time_total_ms = rec.time_pp_ms + (rec.time_cg_ms or 0.0)
        rec.feasible = pp.feasible
        rec.restoration_flips = pp.restoration_flips
        rec.optimization_flips = pp.optimization_flips
        if pp.feasible:
            rec.E = pp.objective
            if rec.E_star is not None:
                try:
                    rec.relative_error = relative_error(rec.E, rec.E_star)
                except UndefinedMetricError:
                    rec.relative_error = None
        records.append(rec)
    return records


def _instance_args(spec: ExperimentSpec):
    for n in spec.n_values:
        for ratio_idx in range(len(spec.ratio_values)):
            for inst_idx in range(spec.instances_per_cell):
                yield (spec, n, ratio_idx, inst_idx)


def run_experiment(spec: ExperimentSpec, jobs: int = 1) -> list[InstanceRecord]:
    """Run the sweep; records come back in canonical identifier order
    regardless of execution order or parallelism."""
    if not spec.methods:
        return []
    args = list(_instance_args(spec))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_instance_star, args))
    else:
        chunks = [_run_instance(*a) for a in args]
    records = [rec for chunk in chunks for rec in chunk]
    records.sort(key=lambda r: (r.n, r.m, r.ratio, r.seed, r.method))
    return records


def _run_instance_star(args):
    return _run_instance(*args)


# --- CSV output -------------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.12g}"


def write_records_csv(records, fh) -> None:
    fh.write(CSV_HEADER + "\n")
    for r in records:
        fields = (r.n, r.m, r.ratio, r.seed, r.method, r.relax_obj, r.E,
                  r.E_star, r.relative_error, r.hamming, r.feasible,
                  r.cg_iterations, r.cg_termination, r.restoration_flips,
                  r.optimization_flips, r.time_cg_ms, r.time_pp_ms,
                  r.time_total_ms)
        fh.write(",".join("" if f is None else f if isinstance(f, str) else _fmt(f)
                          for f in fields) + "\n")


def records_to_csv(records) -> str:
    buf = io.StringIO()
    write_records_csv(records, buf)
    return buf.getvalue()


def fit_exponential(points) -> tuple[float, float]:
    """Least-squares fit of y = exp(a x + b): a line fit of ln y against x."""
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 2:
        raise ValueError("need at least two points")
    if any(y <= 0 for _, y in pts):
        raise ValueError("y values must be positive")
    xs = np.array([p[0] for p in pts])
    if np.all(xs == xs[0]):
        raise ValueError("need at least two distinct x values")
    ys = np.log([p[1] for p in pts])
    a, b = np.polyfit(xs, ys, 1)
    return float(a), float(b)
