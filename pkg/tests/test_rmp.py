import numpy as np
import pytest

from cgqp import build_column, generate_random, solve_rmp
from cgqp.rmp import Column, ColumnPool, RmpInfeasibleError


def make_pool(specs):
    pool = ColumnPool()
    for idx, (cost, activity) in enumerate(specs):
        x = np.array([(idx >> k) & 1 for k in range(8)], dtype=np.uint8)
        pool.add(Column(x=x, cost=float(cost), activity=np.asarray(activity, dtype=np.float64)))
    return pool


def random_pool(rng, n_cols, m):
    """Pool drawn from actual benchmark columns so activities are realistic."""
    inst = generate_random(8, m, int(rng.integers(0, 2**32)))
    pool = ColumnPool()
    while len(pool) < n_cols:
        x = rng.integers(0, 2, 8).astype(np.uint8)
        if not pool.contains(x):
            pool.add(build_column(inst, x))
    return inst, pool


def check_optimality_conditions(pool, b, sol, tol=1e-6):
    costs = np.array([c.cost for c in pool])
    acts = np.array([c.activity for c in pool]).reshape(len(pool), len(b))
    w = sol.weights
    assert np.all(w >= -1e-12)
    assert abs(w.sum() - 1.0) <= 1e-9
    assert np.all(acts.T @ w <= np.asarray(b) + 1e-9)          # primal feasibility
    assert np.all(sol.mu <= 1e-12)                             # dual sign
    rc = costs - acts @ sol.mu - sol.sigma
    assert np.all(rc >= -1e-9)                                 # dual feasibility
    assert abs(sol.primal_obj - sol.dual_obj(b)) <= tol        # strong duality
    slack = np.asarray(b) - acts.T @ w
    assert np.all(np.abs(sol.mu * slack) <= tol)               # complementary slackness
    assert np.all(np.abs(w * rc) <= tol)


class TestBuildColumn:
    def test_hand_values(self, e1):
        col = build_column(e1, [1, 0])
        assert col.cost == 1.0 and col.activity.tolist() == [1.0]
        col2 = build_column(e1, [1, 1])
        assert col2.cost == 1.0 and col2.activity.tolist() == [1.0]

    def test_zero_vector(self, e2):
        col = build_column(e2, [0, 0])
        assert col.cost == 0.0 and col.activity.tolist() == [0.0]

    def test_dimension_mismatch(self, e1):
        with pytest.raises(ValueError):
            build_column(e1, [1, 0, 1])


class TestColumnPool:
    def test_rejects_duplicates_preserves_order(self):
        pool = ColumnPool()
        a = Column(x=np.array([0, 1], dtype=np.uint8), cost=1.0, activity=np.zeros(0))
        b = Column(x=np.array([1, 1], dtype=np.uint8), cost=2.0, activity=np.zeros(0))
        pool.add(a)
        pool.add(b)
        assert [c.cost for c in pool] == [1.0, 2.0]
        assert pool.contains([0, 1])
        with pytest.raises(ValueError):
            pool.add(Column(x=np.array([0, 1], dtype=np.uint8), cost=9.0, activity=np.zeros(0)))


class TestSolveRmp:
    def test_two_column_hand_lp(self):
        pool = make_pool([(0.0, [0.0]), (-3.0, [2.0])])
        sol = solve_rmp(pool, [1.0])
        assert np.allclose(sol.weights, [0.5, 0.5])
        assert sol.primal_obj == pytest.approx(-1.5)
        assert sol.mu[0] == pytest.approx(-1.5)
        assert sol.sigma == pytest.approx(0.0)

    def test_single_column(self):
        pool = make_pool([(4.0, [0.5])])
        sol = solve_rmp(pool, [1.0])
        assert np.allclose(sol.weights, [1.0])
        assert sol.primal_obj == pytest.approx(4.0)

    def test_inactive_constraint_picks_cheaper(self):
        pool = make_pool([(5.0, [0.0]), (7.0, [0.0])])
        sol = solve_rmp(pool, [1.0])
        assert np.allclose(sol.weights, [1.0, 0.0])
        assert sol.primal_obj == pytest.approx(5.0)
        assert sol.mu[0] == pytest.approx(0.0)

    def test_empty_pool(self):
        with pytest.raises(ValueError):
            solve_rmp(ColumnPool(), [1.0])

    def test_infeasible_reports_rows(self):
        # conflict between activity row 0 (5*w <= 1) and the convexity row
        # (w = 1); phase one parks the residual on one of them
        pool = make_pool([(1.0, [5.0, 0.0])])
        with pytest.raises(RmpInfeasibleError) as err:
            solve_rmp(pool, [1.0, 1.0])
        assert err.value.rows and set(err.value.rows) <= {0, 2}

    def test_optimality_conditions_random_pools(self):
        rng = np.random.default_rng(2024)
        for _ in range(120):
            m = int(rng.integers(1, 5))
            inst, pool = random_pool(rng, int(rng.integers(1, 12)), m)
            try:
                sol = solve_rmp(pool, inst.b)
            except RmpInfeasibleError:
                continue
            check_optimality_conditions(pool, inst.b, sol)

    def test_objective_matches_scipy(self):
        linprog = pytest.importorskip("scipy.optimize").linprog
        rng = np.random.default_rng(7)
        for _ in range(60):
            m = int(rng.integers(1, 5))
            inst, pool = random_pool(rng, int(rng.integers(1, 12)), m)
            costs = np.array([c.cost for c in pool])
            acts = np.array([c.activity for c in pool]).reshape(len(pool), m)
            ref = linprog(costs, A_ub=acts.T, b_ub=inst.b,
                          A_eq=np.ones((1, len(pool))), b_eq=[1.0], bounds=(0, None))
            try:
                sol = solve_rmp(pool, inst.b)
            except RmpInfeasibleError:
                assert not ref.success
                continue
            assert ref.success
            assert sol.primal_obj == pytest.approx(ref.fun, abs=1e-7)
