"""Problem representation, evaluation, random benchmarks, and instance file I/O.

An instance is the 0-1 quadratic program

    min   sum_{i<=j} Q[i,j] x_i x_j
    s.t.  sum_{i<=j} A[k,i,j] x_i x_j <= b[k]    for k = 0..m-1
          x in {0,1}^n

where Q and every A[k] are upper-triangular (the lower triangle is
structurally zero).  Binary solutions are 1-D uint8 arrays with entries
in {0, 1}; helpers below validate and canonicalize them.

Coefficients are stored as float64.  The benchmark family is integral
(+/-1 entries, b=1), and every value arising in evaluation stays far
below 2**53, so float64 arithmetic on these instances is exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple

import numpy as np


class InstanceFormatError(ValueError):
    """Raised when an instance file or payload is malformed."""


def as_bits(x, n: int | None = None) -> np.ndarray:
    """Canonicalize ``x`` to a read-only uint8 vector of 0/1 entries."""
    bits = np.asarray(x)
    if bits.ndim != 1:
        raise ValueError(f"binary solution must be 1-D, got shape {bits.shape}")
    if bits.size and not np.isin(bits, (0, 1)).all():
        raise ValueError("binary solution entries must be 0 or 1")
    if n is not None and bits.size != n:
        raise ValueError(f"binary solution has length {bits.size}, expected {n}")
    out = bits.astype(np.uint8)
    out.flags.writeable = False
    return out


def bits_key(x: np.ndarray) -> bytes:
    """Hashable canonical key for a binary solution."""
    return as_bits(x).tobytes()


def eval_quadratic_form(M: np.ndarray, x) -> float:
    """Evaluate sum_{i<=j} M[i,j] x_i x_j for upper-triangular M."""
    M = np.asarray(M, dtype=np.float64)
    bits = as_bits(x)
    if M.shape != (bits.size, bits.size):
        raise ValueError(f"matrix shape {M.shape} does not match solution length {bits.size}")
    xf = bits.astype(np.float64)
    return float(xf @ M @ xf)


class FeasibilityReport(NamedTuple):
    feasible: bool
    violations: np.ndarray  # v_k = max(0, lhs_k - b_k)
    margins: np.ndarray     # r_k = b_k - lhs_k


def _check_upper_triangular(M: np.ndarray, name: str) -> None:
    if np.any(np.tril(M, -1)):
        raise ValueError(f"{name} has nonzero entries below the diagonal")


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass
class ProblemInstance:
    """Immutable instance data: sizes, objective Q, constraints (A, b)."""

    n: int
    m: int
    Q: np.ndarray          # (n, n) upper-triangular
    A: np.ndarray          # (m, n, n), each slice upper-triangular
    b: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.m < 0:
            raise ValueError("m must be >= 0")
        self.Q = np.array(self.Q, dtype=np.float64)
        self.A = np.array(self.A, dtype=np.float64).reshape(self.m, self.n, self.n)
        self.b = np.array(self.b, dtype=np.float64).reshape(self.m)
        if self.Q.shape != (self.n, self.n):
            raise ValueError(f"Q has shape {self.Q.shape}, expected {(self.n, self.n)}")
        _check_upper_triangular(self.Q, "Q")
        for k in range(self.m):
            _check_upper_triangular(self.A[k], f"A[{k}]")
        _freeze(self.Q), _freeze(self.A), _freeze(self.b)

    def objective(self, x) -> float:
        return eval_quadratic_form(self.Q, x)

    def constraint_values(self, x) -> np.ndarray:
        """Left-hand sides sum_{i<=j} A[k,i,j] x_i x_j for every k."""
        bits = as_bits(x, self.n)
        xf = bits.astype(np.float64)
        if self.m == 0:
            return np.zeros(0)
        return self.A @ xf @ xf

    def feasibility(self, x) -> FeasibilityReport:
        """Violations v_k = max(0, lhs_k - b_k) and margins r_k = b_k - lhs_k."""
        lhs = self.constraint_values(x)
        margins = self.b - lhs
        violations = np.maximum(0.0, lhs - self.b)
        return FeasibilityReport(bool(np.all(violations == 0.0)), violations, margins)

    # Symmetrized views used by single-flip delta computations:
    # mirror[i, j] = M[min(i,j), max(i,j)] for i != j, zero diagonal.
    @cached_property
    def q_parts(self) -> tuple[np.ndarray, np.ndarray]:
        return _sym_parts(self.Q)

    @cached_property
    def a_parts(self) -> tuple[np.ndarray, np.ndarray]:
        diags = np.stack([np.diagonal(self.A[k]) for k in range(self.m)]) if self.m else np.zeros((0, self.n))
        mirrors = np.stack([_sym_parts(self.A[k])[1] for k in range(self.m)]) if self.m else np.zeros((0, self.n, self.n))
        return _freeze(diags), _freeze(mirrors)


def _sym_parts(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    diag = np.diagonal(M).copy()
    mirror = M + M.T
    np.fill_diagonal(mirror, 0.0)
    return _freeze(diag), _freeze(mirror)


def generate_random(n: int, m: int, seed: int) -> ProblemInstance:
    """Random benchmark instance: coefficients drawn uniformly from {+1, -1},
    every bound b_k = 1.

    Reproducible: the PRNG is PCG64 seeded with ``seed``; one bit is drawn
    per coefficient (bit 1 -> +1, bit 0 -> -1) in a fixed order: the upper
    triangle of Q row-major, then each A_k in the same order.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if m < 0:
        raise ValueError("m must be >= 0")
    rng = np.random.Generator(np.random.PCG64(seed))
    tri = n * (n + 1) // 2
    bits = rng.integers(0, 2, size=(m + 1) * tri)
    vals = bits.astype(np.float64) * 2.0 - 1.0
    iu = np.triu_indices(n)
    Q = np.zeros((n, n))
    Q[iu] = vals[:tri]
    A = np.zeros((m, n, n))
    for k in range(m):
        A[k][iu] = vals[(k + 1) * tri:(k + 2) * tri]
    return ProblemInstance(n=n, m=m, Q=Q, A=A, b=np.ones(m))


# ---------------------------------------------------------------------------
# Instance file format: UTF-8 JSON with 1-based [i, j, value] triples, i <= j.
# Missing triples mean zero.  The writer emits triples sorted by (i, j); the
# parser accepts any order but rejects duplicates and i > j.
# ---------------------------------------------------------------------------

_TOP_KEYS = ("n", "m", "b", "Q", "A")


def _triples(M: np.ndarray, n: int) -> list[list]:
    out = []
    for i, j in zip(*np.triu_indices(n)):
        v = M[i, j]
        if v != 0.0:
            out.append([int(i) + 1, int(j) + 1, _plain_number(v)])
    return out


def _plain_number(v: float):
    iv = int(v)
    return iv if iv == v else float(v)


def instance_to_dict(inst: ProblemInstance) -> dict:
    return {
        "n": inst.n,
        "m": inst.m,
        "b": [_plain_number(v) for v in inst.b],
        "Q": _triples(inst.Q, inst.n),
        "A": [_triples(inst.A[k], inst.n) for k in range(inst.m)],
    }


def _parse_triples(entries, n: int, where: str) -> np.ndarray:
    if not isinstance(entries, list):
        raise InstanceFormatError(f"{where}: expected a list of [i, j, value] triples")
    M = np.zeros((n, n))
    seen = set()
    for pos, t in enumerate(entries):
        label = f"{where}[{pos}]"
        if not isinstance(t, (list, tuple)) or len(t) != 3:
            raise InstanceFormatError(f"{label}: expected [i, j, value]")
        i, j, v = t
        if not isinstance(i, int) or not isinstance(j, int) or isinstance(i, bool) or isinstance(j, bool):
            raise InstanceFormatError(f"{label}: indices must be integers")
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise InstanceFormatError(f"{label}: value must be a number")
        if not (1 <= i <= n and 1 <= j <= n):
            raise InstanceFormatError(f"{label}: index pair ({i}, {j}) out of range 1..{n}")
        if i > j:
            raise InstanceFormatError(f"{label}: index pair ({i}, {j}) has i > j")
        if (i, j) in seen:
            raise InstanceFormatError(f"{label}: duplicate entry for ({i}, {j})")
        seen.add((i, j))
        M[i - 1, j - 1] = float(v)
    return M


def instance_from_dict(data) -> ProblemInstance:
    if not isinstance(data, dict):
        raise InstanceFormatError("top level: expected a JSON object")
    for key in _TOP_KEYS:
        if key not in data:
            raise InstanceFormatError(f"top level: missing field '{key}'")
    for key in data:
        if key not in _TOP_KEYS:
            raise InstanceFormatError(f"top level: unknown field '{key}'")
    n, m = data["n"], data["m"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InstanceFormatError("n: must be a positive integer")
    if not isinstance(m, int) or isinstance(m, bool) or m < 0:
        raise InstanceFormatError("m: must be a non-negative integer")
    b = data["b"]
    if not isinstance(b, list) or any(not isinstance(v, (int, float)) or isinstance(v, bool) for v in b):
        raise InstanceFormatError("b: must be a list of numbers")
    if len(b) != m:
        raise InstanceFormatError(f"b: has length {len(b)}, expected m = {m}")
    Q = _parse_triples(data["Q"], n, "Q")
    if not isinstance(data["A"], list):
        raise InstanceFormatError("A: expected a list of triple lists")
    if len(data["A"]) != m:
        raise InstanceFormatError(f"A: has length {len(data['A'])}, expected m = {m}")
    A = np.zeros((m, n, n))
    for k in range(m):
        A[k] = _parse_triples(data["A"][k], n, f"A[{k}]")
    return ProblemInstance(n=n, m=m, Q=Q, A=A, b=np.asarray(b, dtype=np.float64))


def instance_to_json(inst: ProblemInstance) -> str:
    return json.dumps(instance_to_dict(inst))


def instance_from_json(text: str | bytes) -> ProblemInstance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"invalid JSON: {exc}") from exc
    return instance_from_dict(data)


def save_instance(inst: ProblemInstance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(instance_to_json(inst))


def load_instance(path) -> ProblemInstance:
    with open(path, "r", encoding="utf-8") as fh:
        return instance_from_json(fh.read())


def flip(x: np.ndarray, i: int) -> np.ndarray:
    """Copy of ``x`` with bit i flipped."""
    bits = as_bits(x)
    if not 0 <= i < bits.size:
        raise IndexError(f"bit index {i} out of range for length {bits.size}")
    out = bits.copy()
    out[i] ^= 1
    return _freeze(out)


def all_solutions(n: int) -> Iterable[np.ndarray]:
    """All 2^n binary vectors in lexicographic order (x_0 most significant)."""
    for code in range(1 << n):
        yield code_to_bits(code, n)


def bits_to_code(x: np.ndarray) -> int:
    """Lexicographic integer code of a bit vector (bit 0 most significant)."""
    bits = as_bits(x)
    code = 0
    for v in bits:
        code = (code << 1) | int(v)
    return code


def code_to_bits(code: int, n: int) -> np.ndarray:
    out = np.fromiter(((code >> (n - 1 - j)) & 1 for j in range(n)), dtype=np.uint8, count=n)
    return _freeze(out)
