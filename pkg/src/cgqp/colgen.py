"""Column-generation driver.

Alternates between the restricted master problem and a QUBO pricing problem
built from the master duals.  A pricing solution with negative reduced cost
joins the pool; otherwise the loop stops and the last master solution defines
the continuous relaxation X = sum_p w_p x^p (x^p)^T.

The pricing objective is the reduced cost

    rc(x) = x'Qx - sum_k mu_k x'A_k x - sigma
          = x'(Q - sum_k mu_k A_k)x - sigma

so the pricing QUBO has coefficients Q - sum_k mu_k A_k and offset -sigma;
its energy at any x equals the reduced cost of the column built from x.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .instance import ProblemInstance, as_bits
from .qubo import Qubo, SaConfig, SearchExhausted, solve_exact, solve_sa
from .rmp import Column, ColumnPool, RmpInfeasibleError, RmpSolution, build_column, solve_rmp

Termination = Literal["converged", "max_iter", "duplicate_stall"]


@dataclass
class CgConfig:
    pricing_backend: Literal["exact", "sa"] = "exact"
    rc_tolerance: float = 1e-9
    max_iterations: int = 200
    sa_config: SaConfig | None = None
    duplicate_retries: int = 3

    def __post_init__(self):
        if self.rc_tolerance <= 0:
            raise ValueError("rc_tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if self.duplicate_retries < 0:
            raise ValueError("duplicate_retries must be non-negative")
        if self.pricing_backend not in ("exact", "sa"):
            raise ValueError(f"unknown pricing backend {self.pricing_backend!r}")


@dataclass
class CgIteration:
    rmp_obj: float
    pricing_obj: float
    pool_size: int
    column_added: bool


@dataclass
class CgResult:
    pool: ColumnPool
    weights: np.ndarray
    relax_obj: float
    X: np.ndarray
    iterations: int
    termination: Termination
    history: list[CgIteration] = field(default_factory=list)


def pricing_qubo(inst: ProblemInstance, mu, sigma: float) -> Qubo:
    mu = np.asarray(mu, dtype=np.float64)
    if mu.size != inst.m:
        raise ValueError(f"mu has length {mu.size}, expected m = {inst.m}")
    coeffs = inst.Q - np.tensordot(mu, inst.A, axes=1) if inst.m else inst.Q.copy()
    return Qubo(coeffs=coeffs, offset=-float(sigma))


def reduced_cost(col: Column, mu, sigma: float) -> float:
    mu = np.asarray(mu, dtype=np.float64)
    return float(col.cost - mu @ col.activity - sigma)


def assemble_X(pool: ColumnPool, weights) -> np.ndarray:
    """Relaxation matrix X = sum_p w_p x^p (x^p)^T (exactly symmetric)."""
    w = np.asarray(weights, dtype=np.float64)
    if w.size != len(pool):
        raise ValueError(f"{w.size} weights for {len(pool)} columns")
    if np.any(w < -1e-9) or abs(w.sum() - 1.0) > 1e-6:
        raise ValueError("weights must be non-negative and sum to 1")
    B = np.array([col.x for col in pool], dtype=np.float64)
    M = (B.T * w) @ B
    upper = np.triu(M)
    return upper + np.triu(M, 1).T


def _derived_sa_seed(base_seed: int, attempt: int) -> int:
    return int(np.random.SeedSequence((base_seed, attempt)).generate_state(1, dtype=np.uint64)[0])


def run_cg(inst: ProblemInstance, initial, cfg: CgConfig | None = None) -> CgResult:
    """Run the column-generation loop from the given initial solutions.

    The exact backend prices with the pool passed as the exclusion set, so a
    returned solution is never a duplicate; exhausting the cube means no
    improving column exists outside the pool and counts as convergence.  The
    annealing backend has no exclusion mechanism, so a pooled pricing
    solution triggers a re-solve under a freshly derived seed, up to
    ``duplicate_retries`` times before stopping with ``duplicate_stall``.
    """
    cfg = cfg or CgConfig()
    initial = list(initial)
    if not initial:
        raise ValueError("at least one initial solution is required")
    sa_cfg = cfg.sa_config or SaConfig()

    pool = ColumnPool()
    for x in initial:
        bits = as_bits(x, inst.n)
        if not pool.contains(bits):
            pool.add(build_column(inst, bits))

    history: list[CgIteration] = []
    termination: Termination | None = None
    rmp: RmpSolution | None = None
    pool_dirty = True
    sa_calls = 0

    for _ in range(cfg.max_iterations):
        try:
            rmp = solve_rmp(pool, inst.b)
        except RmpInfeasibleError as exc:
            raise ValueError(
                "initial restricted master problem is infeasible; "
                "supply feasible initial columns"
            ) from exc
        pool_dirty = False
        q = pricing_qubo(inst, rmp.mu, rmp.sigma)

        if cfg.pricing_backend == "exact":
            try:
                sol = solve_exact(q, exclude=pool.solutions())
            except SearchExhausted:
                termination = "converged"
                history.append(CgIteration(rmp.primal_obj, np.inf, len(pool), False))
                break
            duplicate = False
        else:
            sol = solve_sa(q, dataclasses.replace(sa_cfg, seed=_derived_sa_seed(sa_cfg.seed, sa_calls)))
            sa_calls += 1
            duplicate = pool.contains(sol.x)
            retries = 0
            while duplicate and sol.energy < -cfg.rc_tolerance and retries < cfg.duplicate_retries:
                sol = solve_sa(q, dataclasses.replace(sa_cfg, seed=_derived_sa_seed(sa_cfg.seed, sa_calls)))
                sa_calls += 1
                retries += 1
                duplicate = pool.contains(sol.x)

        rc = sol.energy
        if rc >= -cfg.rc_tolerance:
            termination = "converged"
            history.append(CgIteration(rmp.primal_obj, rc, len(pool), False))
            break
        if duplicate:
            termination = "duplicate_stall"
            history.append(CgIteration(rmp.primal_obj, rc, len(pool), False))
            break
        pool.add(build_column(inst, sol.x))
        pool_dirty = True
        history.append(CgIteration(rmp.primal_obj, rc, len(pool), True))

    if termination is None:
        termination = "max_iter"
    if pool_dirty or rmp is None:
        rmp = solve_rmp(pool, inst.b)

    X = assemble_X(pool, rmp.weights)
    return CgResult(pool=pool, weights=rmp.weights, relax_obj=rmp.primal_obj,
                    X=X, iterations=len(history), termination=termination,
                    history=history)
