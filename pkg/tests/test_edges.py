import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from attrgraph import edges
from attrgraph.errors import InfeasibleBudget, ZeroColumn, ZeroExpectedDegree
from attrgraph.model import AttributedGraph, DegreePlan


def quantile_oracle(n, phi, m):
    """Degree sequence evaluated one node at a time with math only."""
    lo, hi = edges.degree_support(n, m)
    out = []
    for i in range(n):
        q = (n - 1 - i + 0.5) / n
        if hi <= lo:
            x = lo
        elif abs(phi - 1) < 1e-12:
            x = lo * (hi / lo) ** q
        else:
            a = 1 - phi
            x = (lo ** a + q * (hi ** a - lo ** a)) ** (1 / a)
        out.append(min(max(round(x), 1), n - 1))
    return out


def test_phi_grid():
    assert edges.PHI_GRID[0] == 1.0 and edges.PHI_GRID[-1] == 3.0 and len(edges.PHI_GRID) == 201


@pytest.mark.parametrize("phi", [1.0, 1.37, 2.0, 2.99])
def test_quantiles_match_oracle(phi):
    got = edges.powerlaw_degrees(300, phi, 1500)
    assert got.tolist() == quantile_oracle(300, phi, 1500)


def test_fit_is_grid_optimal():
    n, m = 1024, 8192
    phi = edges.fit_degree_exponent(n, m)
    gaps = [abs(m - sum(quantile_oracle(n, float(p), m)) / 2) for p in edges.PHI_GRID]
    best = min(gaps)
    assert abs(m - edges.powerlaw_degrees(n, phi, m).sum() / 2) == best
    # ties go to the smallest exponent
    assert phi == float(edges.PHI_GRID[gaps.index(best)])


def test_fit_infeasible():
    with pytest.raises(InfeasibleBudget):
        edges.fit_degree_exponent(4, 7)


def test_fit_two_nodes():
    phi = edges.fit_degree_exponent(2, 1)
    assert edges.powerlaw_degrees(2, phi, 1).tolist() == [1, 1]


def test_user_degrees_passthrough():
    plan = edges.build_degree_plan(100, degrees=[4] * 100)
    assert plan.theta.tolist() == [4] * 100
    assert not plan.theta_prime.any()


@pytest.mark.parametrize("n,m", [(1000, 2000), (1000, 10000), (4096, 65536), (2048, 65536), (50, 200)])
def test_plan_properties(n, m):
    plan = edges.build_degree_plan(n, m=m)
    th = plan.theta
    assert np.all(np.diff(th) <= 0) and th[-1] >= 1
    assert abs(th.sum() - 2 * m) <= 2 * n


def test_plan_at_fixed_exponent_matches_oracle():
    m = 5000
    plan = edges.build_degree_plan(1000, 2.0, m)
    oracle = sum(quantile_oracle(1000, 2.0, m)) / 2
    assert abs(plan.theta.sum() / 2 - oracle) <= 0.05 * oracle


def test_table_two_equal_masses():
    t = edges.build_sampler_tables(np.array([[0.5], [0.5]]), 2, 1)[0]
    L = t.size
    assert L == 200
    assert (t[: L // 2] == 0).all() and (t[L // 2:] == 1).all()


def test_table_point_mass():
    col = np.zeros((6, 1))
    col[3] = 1.0
    assert (edges.build_sampler_tables(col, 6, 1)[0] == 3).all()


def test_table_zero_column():
    with pytest.raises(ZeroColumn):
        edges.build_sampler_tables(np.zeros((3, 2)) + [[1, 0]], 3, 2)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 40))
def test_table_matches_definition(seed, n):
    rng = np.random.default_rng(seed)
    col = rng.random(n) * (rng.random(n) < 0.7)
    col[rng.integers(n)] += 0.1
    table = edges.build_sampler_tables(col[:, None], n, 1)[0]
    L = 100 * n
    cdf = np.cumsum(col) / col.sum()
    for c in range(0, L, max(1, L // 97)):
        expect = next(i for i in range(n) if cdf[i] > c / L or i == n - 1)
        assert table[c] == expect
    assert np.all(np.diff(table) >= 0)
    # per-node share of the table is within one step of its weight
    share = np.bincount(table, minlength=n) / L
    assert np.max(np.abs(share - col / col.sum())) <= 1.0 / L + 1e-12


def test_table_sampling_frequency():
    n = 100
    rng = np.random.default_rng(5)
    col = rng.random(n)
    p = col / col.sum()
    table = edges.build_sampler_tables(col[:, None], n, 1)[0]
    draws = table[(rng.random(10 ** 6) * table.size).astype(int)]
    freq = np.bincount(draws, minlength=n) / 1e6
    w = 1.0 / (100 * n)
    mc = 5 * np.sqrt(p * (1 - p) / 1e6)
    assert np.all(np.abs(freq - p) <= 3 * w + mc)


def test_generate_zero_degrees():
    U = np.full((5, 2), 0.5)
    plan = DegreePlan(np.zeros(5, dtype=int))
    e, stats = edges.generate_edges(U, U, plan, 2, 10, 0)
    assert e.shape == (0, 2) and stats.candidates == 0


def test_generate_forced_edge():
    U = np.ones((2, 1))
    plan = DegreePlan([1, 1])
    e, _ = edges.generate_edges(U, U, plan, 1, 1000, 0)
    assert e.tolist() == [[0, 1]]
    assert plan.theta_prime.tolist() == [1, 1]


@pytest.mark.parametrize("method", edges.EDGE_METHODS)
@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(3, 60), k=st.integers(1, 4), r=st.integers(1, 8))
def test_generate_invariants(method, seed, n, k, r):
    rng = np.random.default_rng(seed)
    U = rng.dirichlet(np.ones(k), size=n)
    Up = rng.dirichlet(np.ones(k), size=n)
    theta = np.sort(rng.integers(0, n, size=n))[::-1]
    plan = DegreePlan(theta)
    e, stats = edges.generate_edges(U, Up, plan, k, r, seed, method=method)
    AttributedGraph(n, e, np.ones(n, dtype=int)).validate(1)
    deg = np.bincount(e.ravel(), minlength=n)
    assert np.array_equal(deg, plan.theta_prime)
    assert np.all(deg <= theta)
    assert stats.candidates == (stats.rejected_budget + stats.rejected_duplicate
                                + stats.rejected_self_loop + e.shape[0])


def test_generate_deterministic():
    rng = np.random.default_rng(3)
    U = rng.dirichlet(np.ones(3), size=200)
    runs = []
    for _ in range(2):
        plan = edges.build_degree_plan(200, m=800)
        runs.append(edges.generate_edges(U, U, plan, 3, 50, 11)[0])
    assert np.array_equal(*runs)


def test_degree_fidelity_table3_settings():
    from attrgraph import GeneratorConfig, generate
    from attrgraph.presets import uniform_offdiag
    D = np.full((5, 5), 0.1)
    np.fill_diagonal(D, 0.2)
    res = generate(GeneratorConfig(n=2 ** 12, m=2 ** 16, k=5, M=uniform_offdiag(5, 0.4), D=D,
                                   class_size_mode="explicit", rho=np.full(5, 0.2)))
    assert res.degree_mape < 5e-3


def test_mape_examples():
    assert edges.degree_mape([3, 4], [3, 4]) == 0
    assert edges.degree_mape([2, 4], [1, 4]) == 0.25
    assert edges.degree_mape([5], [0]) == 1.0
    with pytest.raises(ZeroExpectedDegree):
        edges.degree_mape([0, 1], [0, 1])


def test_support_bounds():
    lo, hi = edges.degree_support(4096, 65536)
    assert lo == pytest.approx(0.4 * 32) and hi == pytest.approx(math.sqrt(2 * 65536))
    lo, hi = edges.degree_support(10, 20)
    assert hi == 9 and lo == pytest.approx(1.6)
