"""Edge generation: power-law degree plan, inverse-CDF lookup tables and the
degree-constrained class-selection / target-selection loop."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleBudget, ZeroColumn, ZeroExpectedDegree
from .model import DegreePlan

PHI_GRID = np.round(np.arange(100, 301) * 0.01, 2)
TABLE_RESOLUTION = 100  # lookup-table step w = 1 / (TABLE_RESOLUTION * n)
EDGE_METHODS = ("table", "bisect", "direct")


FLOOR_FRACTION = 0.4  # smallest planned degree, as a fraction of the mean degree


def degree_support(n: int, m: int):
    """``(lo, hi)`` range of the continuous degree law for ``n`` nodes, ``m`` edges.

    The floor keeps low-degree nodes from being saturated by the first hubs;
    the cap ``sqrt(2 m)`` (raised to four times the mean degree for small or
    dense graphs so the target stays reachable) bounds hub size.
    """
    top = float(max(n - 1, 1))
    mean = 2.0 * m / n
    hi = min(top, max(np.sqrt(2.0 * m), 4.0 * mean))
    lo = min(max(1.0, FLOOR_FRACTION * mean), hi)
    return lo, hi


def power_law_quantiles(n: int, phi, m: int) -> np.ndarray:
    """Deterministic degree sequence for exponent(s) ``phi``.

    Node ``i`` gets the quantile at ``(i + 0.5) / n`` of the continuous
    density ``x ** -phi`` truncated to ``degree_support(n, m)``, rounded and
    clamped to ``[1, n - 1]``. Returned descending. Broadcasts over an array
    of ``phi`` (result shape ``(len(phi), n)``).
    """
    phi = np.atleast_1d(np.asarray(phi, dtype=float))[:, None]
    lo, hi = degree_support(n, m)
    q = (n - 1 - np.arange(n) + 0.5) / n  # descending quantiles
    if hi <= lo:
        x = np.full((phi.shape[0], n), lo)
    else:
        a = 1.0 - phi
        near_one = np.abs(a) < 1e-12
        safe_a = np.where(near_one, 1.0, a)
        x_pow = (lo ** safe_a + q * (hi ** safe_a - lo ** safe_a)) ** (1.0 / safe_a)
        x_log = lo * (hi / lo) ** q
        x = np.where(near_one, x_log, x_pow)
    return np.clip(np.rint(x), 1, max(n - 1, 1)).astype(np.int64)


def powerlaw_degrees(n: int, phi: float, m: int) -> np.ndarray:
    return power_law_quantiles(n, phi, m)[0]


def _edge_gaps(n: int, m: int, grid) -> np.ndarray:
    gaps = np.empty(len(grid))
    chunk = max(1, 2_000_000 // max(n, 1))
    for s in range(0, len(grid), chunk):
        sums = power_law_quantiles(n, grid[s:s + chunk], m).sum(axis=1)
        gaps[s:s + chunk] = np.abs(m - sums / 2.0)
    return gaps


def fit_degree_exponent(n: int, m: int, grid=PHI_GRID) -> float:
    """Grid-search the exponent whose degree sequence best matches ``m`` edges."""
    if n < 2 or m < 1:
        raise InfeasibleBudget(f"need n >= 2 and m >= 1, got n={n}, m={m}")
    if m > n * (n - 1) // 2:
        raise InfeasibleBudget(f"m={m} exceeds the complete graph on {n} nodes")
    gaps = _edge_gaps(n, m, grid)
    # first index among ties -> smallest exponent
    return float(grid[int(np.argmin(gaps))])


def build_degree_plan(n: int, phi_d: float = None, m: int = None, degrees=None) -> DegreePlan:
    """Expected degrees, descending; from a user list or the power-law fit."""
    if degrees is not None:
        theta = np.sort(np.asarray(degrees, dtype=np.int64))[::-1].copy()
        return DegreePlan(theta)
    if m is None:
        raise ValueError("m is required for a power-law plan")
    if phi_d is None:
        phi_d = fit_degree_exponent(n, m)
    return DegreePlan(powerlaw_degrees(n, phi_d, m))


def build_sampler_tables(U_prime, n: int = None, k: int = None,
                         resolution: int = TABLE_RESOLUTION) -> np.ndarray:
    """Inverse-CDF lookup tables, one row per class.

    Row ``l`` has ``L = resolution * n`` entries; entry ``c`` is the smallest
    node whose normalized cumulative weight in column ``l`` exceeds ``c / L``.
    Built in O(L) per class by repeating node ids.
    """
    U_prime = np.asarray(U_prime, dtype=float)
    n = U_prime.shape[0] if n is None else n
    k = U_prime.shape[1] if k is None else k
    L = resolution * n
    dtype = np.int32 if n < 2**31 else np.int64
    tables = np.empty((k, L), dtype=dtype)
    ids = np.arange(n, dtype=dtype)
    for l in range(k):
        cdf = column_cdf(U_prime[:, l], l)
        bounds = np.minimum(np.ceil(cdf * L).astype(np.int64), L)
        counts = np.diff(bounds, prepend=0)
        tables[l] = np.repeat(ids, counts)
    return tables


def column_cdf(col, l: int = 0) -> np.ndarray:
    total = col.sum()
    if not total > 0:
        raise ZeroColumn(f"no node connects to class {l + 1}")
    cdf = np.cumsum(col) / total
    cdf[-1] = 1.0
    return cdf


@dataclass
class EdgeGenerationStats:
    rounds: int = 0
    candidates: int = 0
    rejected_duplicate: int = 0
    rejected_self_loop: int = 0
    rejected_budget: int = 0
    method: str = "table"
    extra: dict = field(default_factory=dict)


def generate_edges(U, U_prime, plan: DegreePlan, k: int, r: int, rng,
                   method: str = "table", tables=None):
    """Generate an undirected simple edge set under the degree plan.

    Nodes are processed in index order (``plan.theta`` is descending). For
    each node, at most ``r`` rounds draw one class per missing degree from
    its membership row, then one target per class from that class's
    connection column. ``plan.theta_prime`` is updated in place.

    ``method`` picks the target sampler: ``"table"`` (precomputed lookup,
    O(1) per draw), ``"bisect"`` (precomputed column CDFs, binary search) or
    ``"direct"`` (column CDFs recomputed from ``U_prime`` on every round,
    O(kn) per round).

    Returns ``(edges, stats)`` with edges as sorted ``(i, j)`` pairs, i < j.
    """
    if method not in EDGE_METHODS:
        raise ValueError(f"method must be one of {EDGE_METHODS}")
    rng = np.random.default_rng(rng)
    U = np.asarray(U, dtype=float)
    U_prime = np.asarray(U_prime, dtype=float)
    n = plan.n
    stats = EdgeGenerationStats(method=method)

    row_cdf = np.cumsum(U, axis=1)
    row_cdf /= row_cdf[:, -1:]
    row_cdf[:, -1] = 1.0
    if method == "table":
        if tables is None:
            tables = build_sampler_tables(U_prime, n, k)
        L = tables.shape[1]
    elif method == "bisect":
        col_cdfs = np.stack([column_cdf(U_prime[:, l], l) for l in range(k)])
    else:
        for l in range(k):
            column_cdf(U_prime[:, l], l)

    theta = plan.theta.tolist()
    deg = [0] * n
    seen = set()
    found = []
    rounds = candidates = dup = loops = budget = 0

    for i in range(n):
        counter = 0
        while counter < r and deg[i] < theta[i]:
            need = theta[i] - deg[i]
            Z = np.searchsorted(row_cdf[i], rng.random(need), side="right")
            u = rng.random(need)
            if method == "table":
                c = (u * L).astype(np.int64)
                np.minimum(c, L - 1, out=c)
                targets = tables[Z, c].tolist()
            else:
                targets = np.empty(need, dtype=np.int64)
                for l in np.unique(Z):
                    sel = Z == l
                    if method == "bisect":
                        cdf = col_cdfs[l]
                    else:
                        cdf = column_cdf(U_prime[:, l], l)
                    targets[sel] = np.searchsorted(cdf, u[sel], side="right")
                targets = targets.tolist()
            rounds += 1
            for j in targets:
                candidates += 1
                if deg[i] >= theta[i]:
                    budget += 1
                    continue
                if j == i:
                    loops += 1
                    continue
                key = i * n + j if i < j else j * n + i
                if key in seen:
                    dup += 1
                    continue
                if deg[j] >= theta[j]:
                    budget += 1
                    continue
                seen.add(key)
                found.append(key)
                deg[i] += 1
                deg[j] += 1
            counter += 1

    plan.theta_prime = np.asarray(deg, dtype=np.int64)
    stats.rounds = rounds
    stats.candidates = candidates
    stats.rejected_duplicate = dup
    stats.rejected_self_loop = loops
    stats.rejected_budget = budget
    keys = np.sort(np.asarray(found, dtype=np.int64))
    edges = np.column_stack([keys // n, keys % n]) if keys.size else np.empty((0, 2), np.int64)
    return edges.astype(np.int64), stats


def degree_mape(theta, theta_prime) -> float:
    """Mean absolute percentage error between expected and actual degrees."""
    theta = np.asarray(theta, dtype=float)
    theta_prime = np.asarray(theta_prime, dtype=float)
    if np.any(theta <= 0):
        raise ZeroExpectedDegree("expected degrees must be positive")
    return float(np.mean(np.abs((theta - theta_prime) / theta)))

