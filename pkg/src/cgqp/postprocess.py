"""Two-phase postprocessing: feasibility restoration, then local optimization.

Both phases rank single-bit flips by an efficiency score that mixes the
normalized objective change p_i and constraint changes w_ik of each flip:

    e_i = alpha * pbar_i + (1 - alpha) * sum_k beta_k * wbar_ik

with pbar_i = (-p_i) / max_i(-p_i) and wbar_ik = (-w_ik) / max_i(-w_ik),
normalized per the literal formulas (a denominator may be negative; a
denominator smaller than 1e-12 in magnitude zeroes that term instead).

Restoration weights constraints by their violation share and flips greedily
until feasible, bounded by a flip cap and a visited-state set; local
optimization weights by (negated) margin share, only considers improving
flips (p_i < 0), and only accepts flips that keep the state feasible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .instance import FeasibilityReport, ProblemInstance, as_bits, bits_key


@dataclass
class PpConfig:
    alpha_f: float = 0.1     # efficiency weight during feasibility restoration
    alpha_l: float = 0.9     # efficiency weight during local optimization
    max_flips: int = 1000    # restoration flip cap

    def __post_init__(self):
        if not 0.0 <= self.alpha_f <= 1.0:
            raise ValueError("alpha_f must lie in [0, 1]")
        if not 0.0 <= self.alpha_l <= 1.0:
            raise ValueError("alpha_l must lie in [0, 1]")
        if self.max_flips < 1:
            raise ValueError("max_flips must be positive")


@dataclass
class FlipDeltas:
    """Exact single-flip changes at a state x: p[i] is the objective delta of
    flipping bit i, w[i, k] the delta of constraint k's left-hand side, and
    f[i] the flip direction (+1 for 0->1, -1 for 1->0)."""

    p: np.ndarray
    w: np.ndarray
    f: np.ndarray


@dataclass
class PpResult:
    feasible: bool
    x: np.ndarray | None
    objective: float | None
    restoration_flips: int
    optimization_flips: int


def round_solution(X) -> np.ndarray:
    """Round the relaxation to bits: x_i = 1 iff sqrt(clamp(X_ii, 0, 1)) > 0.5."""
    X = np.asarray(X, dtype=np.float64)
    diag = np.clip(np.diagonal(X), 0.0, 1.0)
    return as_bits((np.sqrt(diag) > 0.5).astype(np.uint8))


def flip_deltas(inst: ProblemInstance, x) -> FlipDeltas:
    bits = as_bits(x, inst.n)
    xf = bits.astype(np.float64)
    f = 1.0 - 2.0 * xf
    q_diag, q_mirror = inst.q_parts
    p = f * (q_diag + q_mirror @ xf)
    a_diag, a_mirror = inst.a_parts
    if inst.m:
        w = f[:, None] * (a_diag.T + (a_mirror @ xf).T)
    else:
        w = np.zeros((inst.n, 0))
    return FlipDeltas(p=p, w=w, f=f.astype(np.int8))


def _normalized(v: np.ndarray) -> np.ndarray:
    denom = v.max()
    if abs(denom) < 1e-12:
        return np.zeros_like(v)
    return v / denom


def efficiency(d: FlipDeltas, alpha: float, beta) -> np.ndarray:
    beta = np.asarray(beta, dtype=np.float64)
    pbar = _normalized(-d.p)
    wbar = np.column_stack([_normalized(-d.w[:, k]) for k in range(d.w.shape[1])]) \
        if d.w.shape[1] else np.zeros_like(d.w)
    return alpha * pbar + (1.0 - alpha) * (wbar @ beta)


def beta_feasibility(violations) -> np.ndarray:
    """Violation shares v_k / sum(v); requires an infeasible state."""
    v = np.asarray(violations, dtype=np.float64)
    total = v.sum()
    if total <= 0.0:
        raise ValueError("no violated constraint: state is feasible")
    return v / total


def beta_local(margins) -> np.ndarray:
    """Negated margin shares -r_k / sum(r); uniform -1/m when all tight."""
    r = np.asarray(margins, dtype=np.float64)
    if r.size == 0:
        return r
    total = r.sum()
    if total <= 1e-12:
        return np.full(r.size, -1.0 / r.size)
    return -r / total


def _descending(e: np.ndarray) -> np.ndarray:
    # stable sort on -e: ties resolve to the lowest variable index
    return np.argsort(-e, kind="stable")


def feasibility_restoration(inst: ProblemInstance, x, alpha_f: float,
                            max_flips: int) -> tuple[np.ndarray | None, int]:
    """Greedy violation-reducing flips until feasible.

    Revisiting a state is forbidden (a visited set seeded with the start
    state); each iteration flips the highest-efficiency bit that leads to an
    unvisited state.  Returns (feasible state, flips) or (None, flips) when
    the flip cap is exhausted or every neighbor has been visited.
    """
    bits = np.array(as_bits(x, inst.n))
    visited = {bits_key(bits)}
    flips = 0
    while True:
        report = inst.feasibility(bits)
        if report.feasible:
            return as_bits(bits), flips
        if flips >= max_flips:
            return None, flips
        d = flip_deltas(inst, bits)
        e = efficiency(d, alpha_f, beta_feasibility(report.violations))
        for i in _descending(e):
            bits[i] ^= 1
            key = bits_key(bits)
            if key not in visited:
                visited.add(key)
                flips += 1
                break
            bits[i] ^= 1
        else:
            return None, flips


def local_optimization(inst: ProblemInstance, x, alpha_l: float) -> tuple[np.ndarray, int]:
    """Greedy objective-improving flips that preserve feasibility.

    Candidates are bits with p_i < 0, scanned in descending efficiency; a
    flip is accepted only if the state stays feasible.  Stops when no
    candidate survives, which makes the result 1-flip optimal.
    """
    bits = np.array(as_bits(x, inst.n))
    report = inst.feasibility(bits)
    if not report.feasible:
        raise ValueError("local optimization requires a feasible state")
    margins = report.margins
    flips = 0
    while True:
        d = flip_deltas(inst, bits)
        candidates = d.p < 0.0
        if not candidates.any():
            return as_bits(bits), flips
        e = efficiency(d, alpha_l, beta_local(margins))
        accepted = False
        for i in _descending(e):
            if not candidates[i]:
                continue
            new_margins = margins - d.w[i]
            if np.all(new_margins >= 0.0):
                bits[i] ^= 1
                margins = new_margins
                flips += 1
                accepted = True
                break
        if not accepted:
            return as_bits(bits), flips


def postprocess(inst: ProblemInstance, x_init, cfg: PpConfig | None = None) -> PpResult:
    """Feasibility restoration followed by local optimization."""
    cfg = cfg or PpConfig()
    restored, r_flips = feasibility_restoration(inst, x_init, cfg.alpha_f, cfg.max_flips)
    if restored is None:
        return PpResult(feasible=False, x=None, objective=None,
                        restoration_flips=r_flips, optimization_flips=0)
    final, o_flips = local_optimization(inst, restored, cfg.alpha_l)
    return PpResult(feasible=True, x=final, objective=inst.objective(final),
                    restoration_flips=r_flips, optimization_flips=o_flips)
