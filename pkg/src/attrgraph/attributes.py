"""Attribute generation from ``U V^T`` plus the 1-D Earth-Mover distance."""

from __future__ import annotations

import numpy as np
from scipy import stats as sps

from .errors import BadShape, EmptySample, OutOfRange


def base_attributes(U, V) -> np.ndarray:
    U = np.asarray(U, dtype=float)
    V = np.asarray(V, dtype=float)
    if U.shape[1] != V.shape[1]:
        raise BadShape(f"U is n x {U.shape[1]} but V is d x {V.shape[1]}")
    return U @ V.T


def minmax_columns(X) -> np.ndarray:
    """Scale each column to [0, 1]; constant columns become 0.5."""
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        return X.copy()
    lo = X.min(axis=0)
    span = X.max(axis=0) - lo
    flat = span == 0
    out = (X - lo) / np.where(flat, 1.0, span)
    out[:, flat] = 0.5
    return np.clip(out, 0.0, 1.0)


def apply_normal(base, omega: float, rng) -> np.ndarray:
    """Add N(0, omega^2) noise, then min-max normalize each column."""
    if not omega >= 0:
        raise OutOfRange(f"omega must be >= 0, got {omega}")
    base = np.asarray(base, dtype=float)
    rng = np.random.default_rng(rng)
    noisy = base + rng.normal(0.0, omega, size=base.shape) if omega > 0 else base.copy()
    return minmax_columns(noisy)


def apply_bernoulli(base, rng):
    """Entrywise Bernoulli draws with success probability ``base``.

    Entries are clamped to [0, 1] first; returns ``(X, n_clamped)``.
    """
    base = np.asarray(base, dtype=float)
    rng = np.random.default_rng(rng)
    clamped = np.clip(base, 0.0, 1.0)
    n_clamped = int(np.count_nonzero(clamped != base))
    X = (rng.random(base.shape) < clamped).astype(float)
    return X, n_clamped


def em_distance_1d(samples_a, samples_b) -> float:
    """Exact 1-D Earth-Mover (Wasserstein-1) distance between two samples."""
    a = np.asarray(samples_a, dtype=float).ravel()
    b = np.asarray(samples_b, dtype=float).ravel()
    if a.size == 0 or b.size == 0:
        raise EmptySample("EM distance needs non-empty samples")
    if a.size == b.size:
        return float(np.mean(np.abs(np.sort(a) - np.sort(b))))
    # L1 distance between the two empirical quantile functions
    a = np.sort(a)
    b = np.sort(b)
    grid = np.union1d(np.arange(1, a.size) / a.size, np.arange(1, b.size) / b.size)
    edges = np.concatenate([[0.0], grid, [1.0]])
    mid = 0.5 * (edges[:-1] + edges[1:])
    qa = a[np.minimum((mid * a.size).astype(int), a.size - 1)]
    qb = b[np.minimum((mid * b.size).astype(int), b.size - 1)]
    return float(np.sum(np.diff(edges) * np.abs(qa - qb)))


def em_distance_to_normal(samples, mean: float, sd: float) -> float:
    """EM distance between a sample and N(mean, sd^2).

    Integrates ``|F_emp(x) - Phi(x)|`` exactly between sample points, with
    the normal tails handled in closed form.
    """
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    if x.size == 0:
        raise EmptySample("EM distance needs a non-empty sample")
    if sd == 0:
        return float(np.mean(np.abs(x - mean)))
    # W1 = integral of |F_n - F| dx; split at the sample points.
    dist = sps.norm(mean, sd)
    n = x.size
    total = 0.0
    # left tail: F_n = 0 below x[0]; integral of F(t) from -inf to x0
    total += _normal_cdf_integral(x[0], mean, sd)
    # right tail: F_n = 1 above x[-1]; integral of 1 - F(t) from x_last to inf
    total += _normal_cdf_integral(2 * mean - x[-1], mean, sd)
    if n > 1:
        lo, hi = x[:-1], x[1:]
        level = np.arange(1, n) / n
        total += float(np.sum(_abs_gap_integral(lo, hi, level, dist, mean, sd)))
    return float(total)


def _normal_cdf_integral(b, mean, sd):
    """Integral of Phi((t - mean)/sd) dt from -inf to b."""
    z = (b - mean) / sd
    return sd * (z * sps.norm.cdf(z) + sps.norm.pdf(z))


def _abs_gap_integral(lo, hi, level, dist, mean, sd):
    """Integral over [lo, hi] of |level - F(t)| for a normal F."""
    # F crosses `level` at most once on each interval
    cross = np.clip(dist.ppf(level), lo, hi)
    G = lambda t: _normal_cdf_integral(t, mean, sd)  # noqa: E731
    below = level * (cross - lo) - (G(cross) - G(lo))  # level >= F on [lo, cross]
    above = (G(hi) - G(cross)) - level * (hi - cross)  # F >= level on [cross, hi]
    return below + above


def fitted_normal_em(X, omega: float, means=None) -> float:
    """Sum over columns of the EM distance to N(mean_j, omega^2).

    ``means`` defaults to the column means of ``X`` itself.
    """
    X = np.asarray(X, dtype=float)
    if means is None:
        means = X.mean(axis=0)
    return float(sum(em_distance_to_normal(X[:, j], means[j], omega)
                     for j in range(X.shape[1])))
