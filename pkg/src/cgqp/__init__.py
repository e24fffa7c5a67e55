"""Column generation for inequality-constrained 0-1 quadratic programs,
with QUBO pricing backends and greedy two-phase postprocessing."""

__version__ = "0.1.0"

from .instance import (
    FeasibilityReport,
    InstanceFormatError,
    ProblemInstance,
    eval_quadratic_form,
    generate_random,
    instance_from_json,
    instance_to_json,
    load_instance,
    save_instance,
)
from .qubo import CapacityError, Qubo, QuboSolution, SaConfig, SearchExhausted, delta_energy, solve_exact, solve_sa
from .rmp import Column, ColumnPool, RmpInfeasibleError, RmpSolution, build_column, solve_rmp
from .colgen import CgConfig, CgResult, assemble_X, pricing_qubo, reduced_cost, run_cg
from .postprocess import (
    FlipDeltas,
    PpConfig,
    PpResult,
    beta_feasibility,
    beta_local,
    efficiency,
    feasibility_restoration,
    flip_deltas,
    local_optimization,
    postprocess,
    round_solution,
)
from .bench import (
    ExactResult,
    ExperimentSpec,
    InstanceRecord,
    UndefinedMetricError,
    fit_exponential,
    hamming_distance,
    random_baseline,
    relative_error,
    run_experiment,
    solve_exact_original,
    write_records_csv,
)
