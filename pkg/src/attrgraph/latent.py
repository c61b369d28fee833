"""Latent-factor generation: class sizes, labels, U, U' and V."""

from __future__ import annotations

import math
import warnings

import numpy as np

from .errors import BadExponent, BadShape, DegenerateRow, Infeasible
from .model import ClassSizeDistribution

EPS = 1e-6


def topology_types(M) -> np.ndarray:
    """Boolean mask, True where class ``l`` is positive (``M[l, l] >= 1/k``)."""
    M = np.asarray(M, dtype=float)
    k = M.shape[0]
    return np.diag(M) >= 1.0 / k


def power_law_sizes(k: int, phi_C: float) -> np.ndarray:
    """Class proportions ``l ** -phi_C`` for ranks ``l = 1..k``, normalized."""
    if not math.isfinite(phi_C) or phi_C < 0:
        raise BadExponent(f"class-size exponent must be finite and >= 0, got {phi_C}")
    sizes = np.arange(1, k + 1, dtype=float) ** (-phi_C)
    return sizes / sizes.sum()


def sample_class_sizes(mode: str, k: int, rng=None, *, phi_C: float = 1.0,
                       mean: float = 1.0, dev: float = 0.0, rho=None) -> ClassSizeDistribution:
    """Build the target class-size distribution.

    ``power_law`` is deterministic (rank based) and ignores ``rng``;
    ``normal`` draws one size per class from N(mean, dev), floors at a small
    positive value and normalizes; ``explicit`` passes ``rho`` through.
    """
    if k < 1:
        raise BadShape("k must be >= 1")
    if mode == "power_law":
        if math.isfinite(phi_C) and not 1.0 <= phi_C <= 2.0 and k > 1:
            warnings.warn(f"class-size exponent {phi_C} outside the typical range [1, 2]")
        return ClassSizeDistribution(power_law_sizes(k, phi_C))
    if mode == "normal":
        rng = np.random.default_rng(rng)
        sizes = np.maximum(rng.normal(mean, dev, size=k), EPS * max(abs(mean), 1.0))
        return ClassSizeDistribution(sizes / sizes.sum())
    if mode == "explicit":
        rho = np.asarray(rho, dtype=float)
        if rho.shape != (k,):
            raise BadShape(f"rho must have length {k}")
        return ClassSizeDistribution(rho)
    raise ValueError(f"unknown class size mode {mode!r}")


def assign_labels(rho: ClassSizeDistribution, n: int, rng) -> np.ndarray:
    """Draw 1-based labels i.i.d. from ``rho``; repair empty classes.

    Each empty class takes one node from the currently largest class (the
    highest-index member), so every class ends up non-empty.
    """
    k = rho.k
    if n < k:
        raise Infeasible(f"cannot populate {k} classes with {n} nodes")
    rng = np.random.default_rng(rng)
    cdf = np.cumsum(rho.rho)
    cdf[-1] = 1.0
    C = np.searchsorted(cdf, rng.random(n), side="right") + 1
    counts = np.bincount(C, minlength=k + 1)[1:]
    for l in np.flatnonzero(counts == 0):
        donor = int(np.argmax(counts))
        node = np.flatnonzero(C == donor + 1)[-1]
        C[node] = l + 1
        counts[donor] -= 1
        counts[l] += 1
    return C


def init_membership(C, M, D, rng, eps: float = EPS) -> np.ndarray:
    """Draw ``U[i]`` entrywise from N(M[C_i], D[C_i]), floor at ``eps``, renormalize."""
    C = np.asarray(C)
    M = np.asarray(M, dtype=float)
    D = np.asarray(D, dtype=float)
    if M.shape != D.shape or M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise BadShape("M and D must be matching square matrices")
    rng = np.random.default_rng(rng)
    idx = C - 1
    U = rng.normal(M[idx], D[idx])
    np.maximum(U, eps, out=U)
    U /= U.sum(axis=1, keepdims=True)
    return U


def reverse_rows(U, labels) -> np.ndarray:
    """Vectorized reversal: ``labels`` are 1-based classes of each row.

    The labeled coordinate becomes ``1 - u[l]``; the others get
    ``(1 - u[h]) * u[l] / sum_{j != l}(1 - u[j])``.
    """
    U = np.asarray(U, dtype=float)
    if U.ndim == 1:
        U = U[None, :]
    n, k = U.shape
    if k < 2:
        raise DegenerateRow("reversal needs at least two classes")
    li = np.asarray(labels).reshape(-1) - 1
    rows = np.arange(n)
    own = U[rows, li]
    comp = 1.0 - U
    # sum_{j != l}(1 - u[j]) = k - 2 + u[l] for stochastic rows; this form
    # does not cancel when an off-label entry rounds to 1
    denom = (k - 2) + own
    if np.any(denom <= 0):
        raise DegenerateRow("row has unit mass on every off-label coordinate")
    out = comp * (own / denom)[:, None]
    out[rows, li] = 1.0 - own
    return out


def reverse_membership_row(u_row, l: int) -> np.ndarray:
    """Reverse one membership row for a node of (1-based) class ``l``."""
    return reverse_rows(np.asarray(u_row, dtype=float)[None, :], [l])[0]


def derive_connection_proportions(U, C, M) -> np.ndarray:
    """``U'``: a copy of ``U`` with rows of negative-type classes reversed.

    Apply once per pipeline run; reversal is not an involution.
    """
    U = np.asarray(U, dtype=float)
    C = np.asarray(C)
    positive = topology_types(M)
    U_prime = U.copy()
    neg = ~positive[C - 1]
    if np.any(neg):
        U_prime[neg] = reverse_rows(U[neg], C[neg])
    return U_prime


def init_attr_proportions(H) -> np.ndarray:
    H = np.asarray(H, dtype=float)
    if H.ndim != 2:
        raise BadShape("H must be a d x k matrix")
    return H.copy()
