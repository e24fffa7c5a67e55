import dataclasses

import numpy as np
import pytest

from cgqp import (
    CgConfig,
    ProblemInstance,
    QuboSolution,
    SaConfig,
    assemble_X,
    build_column,
    generate_random,
    pricing_qubo,
    reduced_cost,
    run_cg,
    solve_exact,
)
from cgqp.bench import solve_exact_original, trivial_initial
from cgqp.rmp import Column, ColumnPool

from helpers import make_infeasible_everywhere


class TestPricingQubo:
    def test_hand_example(self, e1):
        q = pricing_qubo(e1, [-1.0], 0.5)
        assert q.coeffs.tolist() == [[2.0, 0.0], [0.0, 0.0]]
        assert q.offset == -0.5
        sol = solve_exact(q)
        assert sol.x.tolist() == [0, 0] and sol.energy == -0.5

    def test_zero_duals(self, e2):
        q = pricing_qubo(e2, [0.0], 0.0)
        assert np.array_equal(q.coeffs, e2.Q)
        assert q.offset == 0.0

    def test_no_constraints(self):
        inst = generate_random(4, 0, 11)
        q = pricing_qubo(inst, [], -2.0)
        assert np.array_equal(q.coeffs, inst.Q)
        assert q.offset == 2.0

    def test_dimension_mismatch(self, e1):
        with pytest.raises(ValueError):
            pricing_qubo(e1, [0.0, 0.0], 0.0)

    def test_energy_equals_reduced_cost(self):
        rng = np.random.default_rng(1)
        inst = generate_random(7, 3, 5)
        mu = -rng.random(3)
        sigma = float(rng.normal())
        q = pricing_qubo(inst, mu, sigma)
        for _ in range(20):
            x = rng.integers(0, 2, 7).astype(np.uint8)
            col = build_column(inst, x)
            assert q.energy(x) == pytest.approx(reduced_cost(col, mu, sigma), abs=1e-12)


class TestReducedCost:
    def test_hand_values(self):
        col = Column(x=np.zeros(2, dtype=np.uint8), cost=1.0, activity=np.array([1.0]))
        assert reduced_cost(col, [-0.5], 0.0) == 1.5
        col2 = Column(x=np.zeros(2, dtype=np.uint8), cost=-3.0, activity=np.array([2.0]))
        assert reduced_cost(col2, [-1.5], 0.0) == 0.0

    def test_cancellation(self):
        col = Column(x=np.zeros(2, dtype=np.uint8), cost=4.0, activity=np.zeros(0))
        assert reduced_cost(col, [], 4.0) == 0.0


class TestAssembleX:
    def test_single_integral_column(self):
        pool = ColumnPool()
        pool.add(Column(x=np.array([1, 1], dtype=np.uint8), cost=0.0, activity=np.zeros(0)))
        X = assemble_X(pool, [1.0])
        assert X.tolist() == [[1.0, 1.0], [1.0, 1.0]]

    def test_even_mixture(self):
        pool = ColumnPool()
        pool.add(Column(x=np.array([1, 0], dtype=np.uint8), cost=0.0, activity=np.zeros(0)))
        pool.add(Column(x=np.array([0, 1], dtype=np.uint8), cost=0.0, activity=np.zeros(0)))
        X = assemble_X(pool, [0.5, 0.5])
        assert X.tolist() == [[0.5, 0.0], [0.0, 0.5]]

    def test_one_hot_weights(self):
        pool = ColumnPool()
        pool.add(Column(x=np.array([1, 0, 1], dtype=np.uint8), cost=0.0, activity=np.zeros(0)))
        pool.add(Column(x=np.array([0, 1, 1], dtype=np.uint8), cost=0.0, activity=np.zeros(0)))
        X = assemble_X(pool, [0.0, 1.0])
        x = np.array([0.0, 1.0, 1.0])
        assert np.array_equal(X, np.outer(x, x))

    def test_symmetry_and_diagonal_range(self):
        rng = np.random.default_rng(3)
        pool = ColumnPool()
        n_cols = 6
        for _ in range(n_cols):
            x = rng.integers(0, 2, 9).astype(np.uint8)
            if not pool.contains(x):
                pool.add(Column(x=x, cost=0.0, activity=np.zeros(0)))
        w = rng.random(len(pool))
        w /= w.sum()
        X = assemble_X(pool, w)
        assert np.array_equal(X, X.T)
        assert np.all(np.diagonal(X) >= -1e-9)
        assert np.all(np.diagonal(X) <= 1 + 1e-9)

    def test_length_mismatch(self):
        pool = ColumnPool()
        pool.add(Column(x=np.array([1], dtype=np.uint8), cost=0.0, activity=np.zeros(0)))
        with pytest.raises(ValueError):
            assemble_X(pool, [0.5, 0.5])


class TestRunCg:
    def test_small_fixture_converges_to_lower_bound(self, e1):
        res = run_cg(e1, [np.array([1, 0], dtype=np.uint8)])
        assert res.termination == "converged"
        assert res.relax_obj <= 0.0 + 1e-9  # E* = 0 for this fixture
        for entry in res.history:
            if entry.column_added:
                assert entry.pricing_obj < -1e-9

    def test_optimum_in_initial_pool(self):
        inst = ProblemInstance(n=3, m=0, Q=np.eye(3), A=np.zeros((0, 3, 3)), b=[])
        res = run_cg(inst, [np.zeros(3, dtype=np.uint8)])
        assert res.termination == "converged"
        assert res.iterations == 1
        assert res.relax_obj == 0.0

    def test_infeasible_initial_rmp(self, infeasible2):
        with pytest.raises(ValueError, match="feasible initial columns"):
            run_cg(infeasible2, [np.array([1, 0], dtype=np.uint8)])

    def test_empty_initial(self, e1):
        with pytest.raises(ValueError):
            run_cg(e1, [])

    def test_rmp_objective_non_increasing(self):
        inst = generate_random(10, 2, 3)
        res = run_cg(inst, [trivial_initial(10)])
        objs = [h.rmp_obj for h in res.history]
        assert all(objs[i + 1] <= objs[i] + 1e-9 for i in range(len(objs) - 1))

    def test_exact_backend_lower_bound(self):
        for seed in range(8):
            n = 10 + (seed % 3)
            inst = generate_random(n, max(1, round(0.2 * n)), seed)
            res = run_cg(inst, [trivial_initial(n)])
            assert res.termination == "converged"
            oracle = solve_exact_original(inst)
            assert oracle.feasible_exists
            assert res.relax_obj <= oracle.e_star + 1e-9

    def test_x_reconstruction(self):
        inst = generate_random(8, 2, 9)
        res = run_cg(inst, [trivial_initial(8)])
        B = np.array([c.x for c in res.pool], dtype=np.float64)
        ref = sum(w * np.outer(x, x) for w, x in zip(res.weights, B))
        assert np.allclose(res.X, ref, atol=1e-12)
        assert np.array_equal(res.X, res.X.T)
        assert np.all(np.diagonal(res.X) <= 1 + 1e-9)
        assert np.all(np.diagonal(res.X) >= -1e-9)

    def test_sa_backend_terminates_and_tracks_exact(self):
        inst = generate_random(10, 2, 3)
        exact_res = run_cg(inst, [trivial_initial(10)])
        sa_res = run_cg(inst, [trivial_initial(10)],
                        CgConfig(pricing_backend="sa", sa_config=SaConfig(seed=11)))
        assert sa_res.termination in ("converged", "duplicate_stall", "max_iter")
        assert abs(sa_res.relax_obj - exact_res.relax_obj) <= 1.0
        # heuristic pricing cannot prove a better bound than exact pricing
        assert sa_res.relax_obj >= exact_res.relax_obj - 1e-9

    def test_max_iterations_cap(self):
        inst = generate_random(12, 4, 8)
        res = run_cg(inst, [trivial_initial(12)], CgConfig(max_iterations=2))
        assert res.iterations <= 2
        if res.termination == "max_iter":
            # final weights must still cover every pooled column
            assert len(res.weights) == len(res.pool)

    def test_duplicate_stall_after_retries(self, monkeypatch):
        inst = generate_random(6, 1, 4)
        pooled = trivial_initial(6)
        calls = {"n": 0}

        def fake_solve_sa(q, cfg):
            calls["n"] += 1
            return QuboSolution(x=pooled, energy=-5.0)

        monkeypatch.setattr("cgqp.colgen.solve_sa", fake_solve_sa)
        res = run_cg(inst, [pooled],
                     CgConfig(pricing_backend="sa", sa_config=SaConfig(seed=0),
                              duplicate_retries=3))
        assert res.termination == "duplicate_stall"
        assert calls["n"] == 4  # initial attempt + 3 retries
        assert res.iterations == 1
