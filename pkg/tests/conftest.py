import numpy as np
import pytest

from attrgraph.model import AttributedGraph


def brute_fractions(n, edge_list, C, k):
    """Per-node class fractions by walking an adjacency dict."""
    nbrs = {i: set() for i in range(n)}
    for a, b in edge_list:
        if a != b:
            nbrs[a].add(b)
            nbrs[b].add(a)
    fr = {}
    for i in range(n):
        if nbrs[i]:
            row = [0.0] * k
            for j in nbrs[i]:
                row[C[j] - 1] += 1.0
            fr[i] = [v / len(nbrs[i]) for v in row]
    return fr


def brute_moments(n, edge_list, C, k):
    fr = brute_fractions(n, edge_list, C, k)
    M = np.full((k, k), np.nan)
    D = np.full((k, k), np.nan)
    for l in range(1, k + 1):
        rows = [fr[i] for i in range(n) if C[i] == l and i in fr]
        if not rows:
            continue
        for h in range(k):
            vals = [r[h] for r in rows]
            mean = sum(vals) / len(vals)
            M[l - 1, h] = mean
            D[l - 1, h] = (sum((v - mean) ** 2 for v in vals) / len(vals)) ** 0.5
    return M, D


def random_labeled_graph(rng, n, k, p):
    C = np.concatenate([np.arange(1, k + 1), rng.integers(1, k + 1, size=n - k)])
    rng.shuffle(C)
    iu = np.triu_indices(n, 1)
    mask = rng.random(iu[0].size) < p
    edges = np.column_stack([iu[0][mask], iu[1][mask]])
    return AttributedGraph.from_edges(n, edges, C)


@pytest.fixture
def path_graph():
    return AttributedGraph.from_edges(4, [(0, 1), (1, 2), (2, 3)], [1, 1, 2, 2])


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
