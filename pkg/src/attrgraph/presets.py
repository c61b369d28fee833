"""Ready-made (M, D) parameterizations.

``lfr_preset`` and ``dcsbm_preset`` zero the deviation so that every node in
a class shares one membership row, which is how the generator mimics the
class-level-only behavior of LFR and degree-corrected SBM.
"""

from __future__ import annotations

import numpy as np

from .errors import BadShape, NonStochasticRow, OutOfRange
from .model import ROW_TOL


def uniform_offdiag(k: int, diag) -> np.ndarray:
    diag = np.broadcast_to(np.asarray(diag, dtype=float), (k,))
    if k == 1:
        return np.ones((1, 1))
    M = np.repeat(((1.0 - diag) / (k - 1))[:, None], k, axis=1)
    np.fill_diagonal(M, diag)
    return M


def lfr_preset(k: int, mu: float):
    """Every diagonal entry ``mu``, off-diagonals ``(1 - mu)/(k - 1)``, zero D.

    ``mu`` is the intra-class fraction here, not the usual LFR inter fraction.
    """
    if k < 2:
        raise OutOfRange("the LFR preset needs k >= 2")
    if not 0.0 <= mu <= 1.0:
        raise OutOfRange(f"mu must lie in [0, 1], got {mu}")
    return uniform_offdiag(k, mu), np.zeros((k, k))


def is_lfr_parameterization(M, D, mu: float, tol: float = 1e-12) -> bool:
    """True when D is zero, off-diagonals are equal per row and the diagonal is ``mu``."""
    M = np.asarray(M, dtype=float)
    D = np.asarray(D, dtype=float)
    k = M.shape[0]
    if np.any(np.abs(D) > tol) or np.any(np.abs(np.diag(M) - mu) > tol):
        return False
    off = M[~np.eye(k, dtype=bool)].reshape(k, k - 1)
    return bool(np.all(np.ptp(off, axis=1) <= tol))


def dcsbm_preset(M_in):
    """Pass a row-stochastic M through with an all-zero D."""
    M = np.array(M_in, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise BadShape("M must be square")
    sums = M.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > ROW_TOL):
        raise NonStochasticRow(f"row sums {sums} are not all 1")
    return M, np.zeros_like(M)


def diagonal_preset(k: int, diag, rng=None, dev_range=(0.05, 0.3), offdiag_dev: float = 0.05):
    """M from its diagonal (off-diagonals filled evenly) and a random D.

    D diagonals are drawn uniformly from ``dev_range``; off-diagonals are
    ``offdiag_dev``.
    """
    diag = np.asarray(diag, dtype=float)
    if diag.shape != (k,):
        raise BadShape(f"diag must have length {k}")
    if np.any(diag < 0) or np.any(diag > 1):
        raise OutOfRange("diagonal values must lie in [0, 1]")
    rng = np.random.default_rng(rng)
    M = uniform_offdiag(k, diag)
    D = np.full((k, k), float(offdiag_dev))
    np.fill_diagonal(D, rng.uniform(dev_range[0], dev_range[1], size=k))
    return M, D
