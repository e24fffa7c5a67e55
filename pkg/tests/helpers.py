"""Shared fixtures and independent brute-force oracles for the test suite.

The oracles deliberately avoid the library's incremental code paths: plain
double loops and full enumeration over binary vectors, so expected values are
computed on an independent route.
"""

from itertools import product

import numpy as np

from cgqp import ProblemInstance


def make_e1() -> ProblemInstance:
    return ProblemInstance(n=2, m=1, Q=[[1, -1], [0, 1]], A=[[[1, 1], [0, -1]]], b=[1])


def make_e2() -> ProblemInstance:
    return ProblemInstance(n=2, m=1, Q=[[-1, -1], [0, -1]], A=[[[1, 1], [0, 1]]], b=[1])


def make_infeasible_everywhere(n: int = 2) -> ProblemInstance:
    """No binary point satisfies the single constraint: 3*sum(x) <= -1."""
    A = np.zeros((1, n, n))
    np.fill_diagonal(A[0], 3.0)
    return ProblemInstance(n=n, m=1, Q=np.triu(np.ones((n, n))), A=A, b=[-1])


def naive_quadratic(M, x) -> float:
    n = len(x)
    total = 0.0
    for i in range(n):
        for j in range(i, n):
            total += M[i][j] * x[i] * x[j]
    return total


def all_states(n: int):
    """All binary vectors in lexicographic order (first bit most significant)."""
    for bits in product((0, 1), repeat=n):
        yield np.array(bits, dtype=np.uint8)


def naive_qubo_min(coeffs, offset, n, exclude=()):
    """Brute-force QUBO minimum with lexicographic tie-break."""
    excluded = {tuple(int(v) for v in x) for x in exclude}
    best = None
    for x in all_states(n):
        if tuple(int(v) for v in x) in excluded:
            continue
        e = naive_quadratic(coeffs, x) + offset
        if best is None or e < best[0]:
            best = (e, x)
    return best


def naive_oracle(inst: ProblemInstance):
    """Brute-force constrained minimum; returns (E*, x*) or None."""
    best = None
    for x in all_states(inst.n):
        lhs = [naive_quadratic(inst.A[k], x) for k in range(inst.m)]
        if any(lhs[k] > inst.b[k] for k in range(inst.m)):
            continue
        e = naive_quadratic(inst.Q, x)
        if best is None or e < best[0]:
            best = (e, x)
    return best
