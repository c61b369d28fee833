"""Class-feature measurement, losses, community statistics and parameter
extraction for labeled graphs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.sparse.csgraph import connected_components, shortest_path

from .errors import AllIsolatedClass, EmptyClass
from .model import AttributedGraph, ClassFeatureReport

EXACT_PATH_LIMIT = 5000
PATH_SAMPLE_SOURCES = 1000


def _class_sizes(C, k):
    return np.bincount(np.asarray(C) - 1, minlength=k)[:k]


def connection_fractions(G: AttributedGraph, k: int):
    """Per-node fraction of edges into each class.

    Returns ``(F, deg)`` where ``F`` is n x k (rows of isolated nodes are 0).
    """
    deg = G.degrees()
    e = G.edges
    counts = np.zeros((G.n, k))
    if e.size:
        np.add.at(counts, (e[:, 0], G.C[e[:, 1]] - 1), 1.0)
        np.add.at(counts, (e[:, 1], G.C[e[:, 0]] - 1), 1.0)
    F = np.divide(counts, deg[:, None], out=np.zeros_like(counts), where=deg[:, None] > 0)
    return F, deg


def _fraction_moments(G: AttributedGraph, k: int, strict: bool = True):
    sizes = _class_sizes(G.C, k)
    if strict and np.any(sizes == 0):
        raise EmptyClass(f"class {int(np.flatnonzero(sizes == 0)[0]) + 1} is empty")
    F, deg = connection_fractions(G, k)
    active = deg > 0
    labels = G.C - 1
    n_active = np.bincount(labels[active], minlength=k)[:k].astype(float)
    isolated = sizes - n_active.astype(int)
    dead = np.flatnonzero((n_active == 0) & (sizes > 0))
    if strict and dead.size:
        raise AllIsolatedClass(f"every node of class {int(dead[0]) + 1} is isolated")
    sums = np.zeros((k, k))
    np.add.at(sums, labels[active], F[active])
    with np.errstate(invalid="ignore", divide="ignore"):
        M = sums / n_active[:, None]
    sq = np.zeros((k, k))
    resid = F[active] - M[labels[active]]
    np.add.at(sq, labels[active], resid ** 2)
    with np.errstate(invalid="ignore", divide="ignore"):
        D = np.sqrt(sq / n_active[:, None])
    return M, D, isolated


def class_preference_mean(G: AttributedGraph, k: int) -> np.ndarray:
    """Mean over non-isolated nodes of each class of their class-fraction vectors."""
    return _fraction_moments(G, k)[0]


def class_preference_deviation(G: AttributedGraph, k: int) -> np.ndarray:
    """Population standard deviation of the same fractions around the mean."""
    return _fraction_moments(G, k)[1]


def attribute_class_correlation(G: AttributedGraph, k: int, strict: bool = True) -> np.ndarray:
    """d x k matrix of per-class attribute means (NaN columns for empty
    classes when not ``strict``)."""
    sizes = _class_sizes(G.C, k)
    if strict and np.any(sizes == 0):
        raise EmptyClass(f"class {int(np.flatnonzero(sizes == 0)[0]) + 1} is empty")
    sums = np.zeros((k, G.d))
    np.add.at(sums, G.C - 1, G.X)
    with np.errstate(invalid="ignore", divide="ignore"):
        return (sums / sizes[:, None]).T


def class_sizes_of(G: AttributedGraph, k: int) -> np.ndarray:
    return _class_sizes(G.C, k) / G.n


def class_size_loss(rho_target, G: AttributedGraph) -> float:
    rho_target = np.asarray(rho_target, dtype=float)
    realized = class_sizes_of(G, rho_target.size)
    return float(np.sum((rho_target - realized) ** 2))


def measure_class_features(G: AttributedGraph, k: int, strict: bool = True) -> ClassFeatureReport:
    """All class features at once. With ``strict=False`` classes without a
    connected node get NaN rows instead of raising."""
    M, D, isolated = _fraction_moments(G, k, strict=strict)
    H = attribute_class_correlation(G, k, strict) if G.d > 0 else None
    return ClassFeatureReport(M, D, class_sizes_of(G, k), H, isolated)


@dataclass
class LossReport:
    """Graph-measured losses against target M and D."""

    l_mean: float
    l_dev: float
    mse_mean: float
    mse_dev: float
    per_class_mean: np.ndarray
    per_class_dev: np.ndarray


def mean_deviation_losses(M_target, D_target, G: AttributedGraph = None, *,
                          measured: Optional[ClassFeatureReport] = None) -> LossReport:
    """Per-row Frobenius losses and k^2-entry MSEs of measured vs target M, D."""
    M_target = np.asarray(M_target, dtype=float)
    D_target = np.asarray(D_target, dtype=float)
    if measured is None:
        measured = measure_class_features(G, M_target.shape[0])
    dm = M_target - measured.M_meas
    dd = D_target - measured.D_meas
    per_m = np.linalg.norm(dm, axis=1)
    per_d = np.linalg.norm(dd, axis=1)
    return LossReport(float(per_m.sum()), float(per_d.sum()), float(np.mean(dm ** 2)),
                      float(np.mean(dd ** 2)), per_m, per_d)


def mse(a, b) -> float:
    return float(np.mean((np.asarray(a, dtype=float) - np.asarray(b, dtype=float)) ** 2))


@dataclass
class CommunityStats:
    intra_density: float
    inter_density: float
    lcc_size: int
    n_components: int
    path_length: float
    path_sources: int
    path_exact: bool
    flags: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "intra_density": self.intra_density,
            "inter_density": self.inter_density,
            "lcc_size": self.lcc_size,
            "n_components": self.n_components,
            "characteristic_path_length": self.path_length,
            "path_length_sources": self.path_sources,
            "path_length_exact": self.path_exact,
            "flags": list(self.flags),
        }


def community_stats(G: AttributedGraph, rng=None, exact_limit: int = EXACT_PATH_LIMIT,
                    n_sources: int = PATH_SAMPLE_SOURCES) -> CommunityStats:
    """Intra/inter-class density, component structure and characteristic path length.

    The path length is the mean shortest-path length over ordered reachable
    pairs inside the largest connected component; for graphs with more than
    ``exact_limit`` nodes it is estimated from ``n_sources`` random sources.
    """
    flags = []
    n = G.n
    k = max(G.k, 1)
    sizes = _class_sizes(G.C, k).astype(float)
    intra_pairs = float(np.sum(sizes * (sizes - 1) / 2))
    all_pairs = n * (n - 1) / 2
    inter_pairs = all_pairs - intra_pairs
    e = G.edges
    same = G.C[e[:, 0]] == G.C[e[:, 1]] if e.size else np.zeros(0, bool)
    n_intra = int(np.count_nonzero(same))
    n_inter = G.m - n_intra
    if intra_pairs > 0:
        intra = n_intra / intra_pairs
    else:
        intra = 0.0
        flags.append("intra_density_undefined")
    if inter_pairs > 0:
        inter = n_inter / inter_pairs
    else:
        inter = 0.0
        flags.append("inter_density_undefined")

    A = G.adjacency()
    n_comp, comp = connected_components(A, directed=False)
    comp_sizes = np.bincount(comp)
    lcc_label = int(np.argmax(comp_sizes))
    lcc_nodes = np.flatnonzero(comp == lcc_label)
    lcc = lcc_nodes.size

    path_len = 0.0
    exact = True
    used = lcc
    if lcc > 1:
        sub = A[lcc_nodes][:, lcc_nodes]
        if lcc > exact_limit:
            exact = False
            rng = np.random.default_rng(rng)
            sources = np.sort(rng.choice(lcc, size=min(n_sources, lcc), replace=False))
        else:
            sources = np.arange(lcc)
        used = sources.size
        total = 0.0
        count = 0
        for s in range(0, sources.size, 256):
            dist = shortest_path(sub, method="D", unweighted=True, directed=False,
                                 indices=sources[s:s + 256])
            total += float(dist.sum())  # all reachable within the LCC
            count += dist.shape[0] * (lcc - 1)
        path_len = total / count
    else:
        flags.append("path_length_undefined")
    return CommunityStats(intra, inter, int(lcc), int(n_comp), path_len, int(used), exact, flags)


@dataclass
class ExtractedParams:
    """Generator inputs recovered from a labeled graph."""

    n: int
    m: int
    k: int
    degrees: np.ndarray
    M: np.ndarray
    D: np.ndarray
    rho: np.ndarray
    H: Optional[np.ndarray] = None
    isolated_per_class: Optional[np.ndarray] = None

    def rescaled_degrees(self, n: int, m: int) -> np.ndarray:
        """Degree sequence resampled to ``n`` nodes and scaled to ``2 m`` stubs.

        The empirical degree quantiles are read at ``(i + 0.5) / n`` and
        multiplied so that the total matches ``2 m``, then rounded and
        clamped to ``[1, n - 1]``.
        """
        src = np.sort(self.degrees.astype(float))
        q = (np.arange(n) + 0.5) / n
        base = src[np.minimum((q * src.size).astype(int), src.size - 1)]
        if base.sum() > 0:
            base = base * (2.0 * m / base.sum())
        return np.clip(np.rint(base), 1, max(n - 1, 1)).astype(np.int64)[::-1]


def extract_params(G: AttributedGraph, k: Optional[int] = None) -> ExtractedParams:
    """Degrees, class preference mean/deviation, class sizes (and H if present)."""
    k = G.k if k is None else k
    M, D, isolated = _fraction_moments(G, k)
    H = attribute_class_correlation(G, k) if G.d > 0 else None
    return ExtractedParams(G.n, G.m, k, G.degrees(), M, D, class_sizes_of(G, k), H, isolated)
