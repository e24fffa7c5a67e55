"""Numba kernels for exhaustive enumeration and simulated-annealing sweeps.

All kernels work on a split coefficient representation: ``diag[i] = M[i, i]``
and ``mirror[i, j] = M[min(i,j), max(i,j)]`` for i != j with a zero diagonal.
The single-flip energy change of bit i at state x is then

    delta_i = (+1 if x_i == 0 else -1) * (diag[i] + sum_j mirror[i, j] x_j)

and the per-bit field h[i] = diag[i] + sum_j mirror[i, j] x_j is maintained
incrementally across flips.

States carry a lexicographic integer code (bit 0 of the solution is the most
significant code bit), so numeric comparison of codes is lexicographic
comparison of bit strings.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _contains(sorted_codes, v):
    lo, hi = 0, sorted_codes.size
    while lo < hi:
        mid = (lo + hi) // 2
        if sorted_codes[mid] < v:
            lo = mid + 1
        else:
            hi = mid
    return lo < sorted_codes.size and sorted_codes[lo] == v


@njit(cache=True)
def _lex_less(a, b):
    for i in range(a.size):
        if a[i] != b[i]:
            return a[i] < b[i]
    return False


@njit(cache=True)
def gray_min_excluded(diag, mirror, offset, excluded_codes, n):
    """Minimize a QUBO over {0,1}^n minus an excluded set.

    Walks the full cube in reflected Gray-code order, updating the energy by a
    single-flip delta per step.  Returns (best_energy, best_code, visited)
    where visited counts the evaluated (non-excluded) states and best_code is
    -1 when every state is excluded.  Ties go to the lexicographically
    smallest bit string.
    """
    x = np.zeros(n, dtype=np.uint8)
    h = diag.copy()
    e = offset
    code = np.int64(0)
    best_e = np.inf
    best_code = np.int64(-1)
    visited = np.int64(0)
    check = excluded_codes.size > 0

    if not (check and _contains(excluded_codes, code)):
        visited += 1
        best_e = e
        best_code = code

    total = np.int64(1) << n
    for c in range(1, total):
        cc = c
        k = 0
        while cc & 1 == 0:
            cc >>= 1
            k += 1
        if x[k] == 0:
            e += h[k]
            x[k] = 1
            for j in range(n):
                h[j] += mirror[j, k]
        else:
            e -= h[k]
            x[k] = 0
            for j in range(n):
                h[j] -= mirror[j, k]
        code ^= np.int64(1) << (n - 1 - k)
        if check and _contains(excluded_codes, code):
            continue
        visited += 1
        if e < best_e or (e == best_e and code < best_code):
            best_e = e
            best_code = code
    return best_e, best_code, visited


@njit(cache=True)
def gray_min_feasible(q_diag, q_mirror, a_diag, a_mirror, b, n):
    """Minimize the objective over feasible binary states.

    Same Gray-code walk as gray_min_excluded, additionally maintaining all m
    constraint left-hand sides incrementally; only states with lhs_k <= b_k
    for every k compete.  Returns (best_obj, best_code) with best_code = -1
    when no state is feasible.
    """
    m = b.size
    x = np.zeros(n, dtype=np.uint8)
    hq = q_diag.copy()
    ha = a_diag.copy()
    e = 0.0
    lhs = np.zeros(m)
    code = np.int64(0)
    best_e = np.inf
    best_code = np.int64(-1)

    feasible = True
    for k in range(m):
        if lhs[k] > b[k]:
            feasible = False
            break
    if feasible:
        best_e = e
        best_code = code

    total = np.int64(1) << n
    for c in range(1, total):
        cc = c
        i = 0
        while cc & 1 == 0:
            cc >>= 1
            i += 1
        if x[i] == 0:
            e += hq[i]
            for k in range(m):
                lhs[k] += ha[k, i]
            x[i] = 1
            for j in range(n):
                hq[j] += q_mirror[i, j]
            for k in range(m):
                for j in range(n):
                    ha[k, j] += a_mirror[k, i, j]
        else:
            e -= hq[i]
            for k in range(m):
                lhs[k] -= ha[k, i]
            x[i] = 0
            for j in range(n):
                hq[j] -= q_mirror[i, j]
            for k in range(m):
                for j in range(n):
                    ha[k, j] -= a_mirror[k, i, j]
        code ^= np.int64(1) << (n - 1 - i)

        feasible = True
        for k in range(m):
            if lhs[k] > b[k]:
                feasible = False
                break
        if not feasible:
            continue
        if e < best_e or (e == best_e and code < best_code):
            best_e = e
            best_code = code
    return best_e, best_code


@njit(cache=True)
def sa_chain(diag, mirror, offset, x, betas, uniforms):
    """One annealing read: sequential single-flip Metropolis sweeps.

    betas holds one inverse temperature per sweep; uniforms holds one uniform
    draw per proposal, consumed in sweep-major, bit-minor order.  Returns the
    best (energy, state) seen anywhere along the chain, breaking energy ties
    toward the lexicographically smaller state.
    """
    n = x.size
    h = diag.copy()
    for i in range(n):
        acc = 0.0
        for j in range(n):
            if x[j] == 1:
                acc += mirror[i, j]
        h[i] += acc
    e = offset
    for i in range(n):
        if x[i] == 1:
            e += diag[i]
            for j in range(i + 1, n):
                if x[j] == 1:
                    e += mirror[i, j]

    best_e = e
    best_x = x.copy()
    t = 0
    for s in range(betas.size):
        beta = betas[s]
        for i in range(n):
            u = uniforms[t]
            t += 1
            d = h[i] if x[i] == 0 else -h[i]
            if d <= 0.0 or u < np.exp(-beta * d):
                e += d
                if x[i] == 0:
                    x[i] = 1
                    for j in range(n):
                        h[j] += mirror[j, i]
                else:
                    x[i] = 0
                    for j in range(n):
                        h[j] -= mirror[j, i]
                if e < best_e or (e == best_e and _lex_less(x, best_x)):
                    best_e = e
                    best_x = x.copy()
    return best_e, best_x
