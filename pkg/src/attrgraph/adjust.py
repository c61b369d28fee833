"""Adjusting-proportion phase: temperature grid search on U/U' and V."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadTemperature, EmptyClass
from .latent import reverse_rows

# T = 0 is excluded: the rescale exponent is 1/T.
T_GRID = np.round(np.arange(1, 21) * 0.05, 2)
TIE_TOL = 1e-12


def rescale_rows(U, T: float) -> np.ndarray:
    """Row-wise ``u ** (1/T) / sum(u ** (1/T))``, computed in log space."""
    if not T > 0:
        raise BadTemperature(f"temperature must be > 0, got {T}")
    U = np.asarray(U, dtype=float)
    with np.errstate(divide="ignore"):
        logs = np.log(U) / T
    logs -= logs.max(axis=-1, keepdims=True)
    out = np.exp(logs)
    out /= out.sum(axis=-1, keepdims=True)
    return out


def rescale_row(u_row, T: float) -> np.ndarray:
    return rescale_rows(np.asarray(u_row, dtype=float)[None, :], T)[0]


def _argmin_smallest(losses) -> int:
    losses = np.asarray(losses)
    return int(np.flatnonzero(losses <= losses.min() + TIE_TOL)[0])


def class_mean_loss(U_rows, U_prime_rows, M_row) -> float:
    """Frobenius gap between ``M_row`` and the mean of ``U * U'`` over the class."""
    est = (U_rows * U_prime_rows).mean(axis=0)
    return float(np.linalg.norm(M_row - est))


@dataclass
class ClassAdjustment:
    l: int
    T_min: float
    loss: float
    loss_before: float
    losses: np.ndarray


def adjust_class(U, U_prime, C, M, l: int, positive: bool, grid=T_GRID) -> ClassAdjustment:
    """Grid-search T for class ``l`` (1-based) and rewrite its rows in place.

    Positive classes set ``U'_i = U_i``; negative ones ``U'_i = rev(U_i)``.
    """
    idx = np.flatnonzero(np.asarray(C) == l)
    if idx.size == 0:
        raise EmptyClass(f"class {l} is empty")
    M_row = np.asarray(M, dtype=float)[l - 1]
    rows = U[idx]
    labels = np.full(idx.size, l)
    before = class_mean_loss(U[idx], U_prime[idx], M_row)

    def partner(x):
        return x if positive else reverse_rows(x, labels)

    losses = np.empty(len(grid))
    for t, T in enumerate(grid):
        x = rescale_rows(rows, T)
        losses[t] = class_mean_loss(x, partner(x), M_row)
    best = _argmin_smallest(losses)
    new = rescale_rows(rows, grid[best])
    U[idx] = new
    U_prime[idx] = partner(new)
    return ClassAdjustment(l, float(grid[best]), float(losses[best]), before, losses)


def class_mean_membership(U, C, k: int) -> np.ndarray:
    """``P[l]``: mean of ``U`` rows over class ``l``."""
    C = np.asarray(C)
    counts = np.bincount(C - 1, minlength=k).astype(float)
    if np.any(counts == 0):
        raise EmptyClass(f"class {int(np.flatnonzero(counts == 0)[0]) + 1} is empty")
    sums = np.zeros((k, U.shape[1]))
    np.add.at(sums, C - 1, U)
    return sums / counts[:, None]


def attribute_loss(H_row, P, v_row) -> float:
    return float(np.linalg.norm(H_row - P @ v_row))


def adjust_attributes(V, P, H, grid=T_GRID):
    """Per attribute, pick T minimizing ``||H_d - P f(V_d, T)||``.

    Returns ``(V_new, T_min, losses)`` where ``losses`` holds the achieved
    residual for every attribute.
    """
    V = np.asarray(V, dtype=float)
    H = np.asarray(H, dtype=float)
    d = V.shape[0]
    V_new = V.copy()
    T_min = np.ones(d)
    achieved = np.zeros(d)
    for delta in range(d):
        cand = [rescale_row(V[delta], T) if V[delta].any() else V[delta] for T in grid]
        losses = [attribute_loss(H[delta], P, v) for v in cand]
        best = _argmin_smallest(losses)
        V_new[delta] = cand[best]
        T_min[delta] = grid[best]
        achieved[delta] = losses[best]
    return V_new, T_min, achieved
