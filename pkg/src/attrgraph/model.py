"""Core value types: generator configuration, latent factors, graphs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .errors import BadShape, ConfigError, NonStochasticRow, OutOfRange

ROW_TOL = 1e-6

ATTR_DISTS = ("normal", "bernoulli")
CLASS_SIZE_MODES = ("power_law", "normal", "explicit")


@dataclass(frozen=True)
class ClassSizeDistribution:
    """Target class proportions ``rho`` (length k, positive, sums to 1)."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=float)
        if rho.ndim != 1 or rho.size == 0:
            raise BadShape(f"rho must be a non-empty vector, got shape {rho.shape}")
        if np.any(~np.isfinite(rho)) or np.any(rho <= 0) or np.any(rho > 1):
            raise OutOfRange("rho entries must lie in (0, 1]")
        if abs(rho.sum() - 1.0) > ROW_TOL:
            raise NonStochasticRow(f"rho sums to {rho.sum():.9g}, expected 1")
        object.__setattr__(self, "rho", rho)

    @property
    def k(self) -> int:
        return self.rho.size


@dataclass(frozen=True)
class GeneratorConfig:
    """All user inputs of one generation run.

    ``M`` and ``D`` are k x k, ``H`` is d x k. Class sizes come from
    ``class_size_mode``: ``"power_law"`` (uses ``phi_C``), ``"normal"``
    (uses ``class_size_mean``/``class_size_dev``) or ``"explicit"`` (uses
    ``rho``). ``degrees`` optionally replaces the fitted power-law degree
    sequence.
    """

    n: int
    m: int
    k: int
    M: np.ndarray
    D: np.ndarray
    d: int = 0
    H: Optional[np.ndarray] = None
    phi_C: float = 1.0
    omega: float = 0.2
    r: int = 50
    attr_dist: str = "normal"
    class_size_mode: str = "power_law"
    class_size_mean: float = 1.0
    class_size_dev: float = 0.0
    rho: Optional[np.ndarray] = None
    degrees: Optional[np.ndarray] = None
    seed: int = 0

    def __post_init__(self):
        for name in ("M", "D", "H", "rho", "degrees"):
            val = getattr(self, name)
            if val is not None:
                object.__setattr__(self, name, np.array(val, dtype=float))
        if self.H is None:
            object.__setattr__(self, "H", np.zeros((self.d, self.k)))

    @property
    def max_edges(self) -> int:
        return self.n * (self.n - 1) // 2


def _check_shape(name, arr, shape):
    if arr is None or arr.shape != shape:
        got = None if arr is None else arr.shape
        raise BadShape(f"{name} must have shape {shape}, got {got}")


def validate_config(cfg: GeneratorConfig) -> None:
    """Raise a :class:`ConfigError` subclass naming the first violated invariant."""
    for name in ("n", "m", "k", "r"):
        val = getattr(cfg, name)
        if int(val) != val or val < 1:
            raise OutOfRange(f"{name} must be a positive integer, got {val}")
    if int(cfg.d) != cfg.d or cfg.d < 0:
        raise OutOfRange(f"d must be a non-negative integer, got {cfg.d}")
    if cfg.k > cfg.n:
        raise OutOfRange(f"k={cfg.k} exceeds n={cfg.n}")
    k, d = cfg.k, cfg.d
    _check_shape("M", cfg.M, (k, k))
    _check_shape("D", cfg.D, (k, k))
    _check_shape("H", cfg.H, (d, k))
    for name, arr in (("M", cfg.M), ("D", cfg.D), ("H", cfg.H)):
        if not np.all(np.isfinite(arr)):
            raise OutOfRange(f"{name} has non-finite entries")
    if np.any(cfg.M < 0) or np.any(cfg.M > 1):
        raise OutOfRange("M entries must lie in [0, 1]")
    if np.any(cfg.D < 0):
        raise OutOfRange("D entries must be >= 0")
    if np.any(cfg.H < 0) or np.any(cfg.H > 1):
        raise OutOfRange("H entries must lie in [0, 1]")
    sums = cfg.M.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > ROW_TOL)
    if bad.size:
        l = int(bad[0])
        raise NonStochasticRow(f"row {l + 1} of M sums to {sums[l]:.9g}, expected 1")
    if not math.isfinite(cfg.omega) or cfg.omega < 0:
        raise OutOfRange(f"omega must be >= 0, got {cfg.omega}")
    if cfg.attr_dist not in ATTR_DISTS:
        raise ConfigError(f"attr_dist must be one of {ATTR_DISTS}, got {cfg.attr_dist!r}")
    if cfg.class_size_mode not in CLASS_SIZE_MODES:
        raise ConfigError(
            f"class_size_mode must be one of {CLASS_SIZE_MODES}, got {cfg.class_size_mode!r}"
        )
    if cfg.class_size_mode == "explicit":
        if cfg.rho is None:
            raise BadShape("explicit class sizes need rho")
        _check_shape("rho", cfg.rho, (k,))
        ClassSizeDistribution(cfg.rho)
    if cfg.degrees is not None:
        _check_shape("degrees", cfg.degrees, (cfg.n,))
        if np.any(cfg.degrees < 0) or np.any(cfg.degrees != np.round(cfg.degrees)):
            raise OutOfRange("degrees must be non-negative integers")
        if np.any(cfg.degrees > cfg.n - 1):
            raise OutOfRange("a degree exceeds n - 1")


@dataclass
class LatentFactors:
    """Membership ``U`` (n x k), connection ``U_prime`` (n x k), attribute ``V`` (d x k)."""

    U: np.ndarray
    U_prime: np.ndarray
    V: np.ndarray

    def check(self, tol: float = ROW_TOL) -> None:
        for name in ("U", "U_prime"):
            arr = getattr(self, name)
            if np.any(arr < -tol) or np.any(arr > 1 + tol):
                raise OutOfRange(f"{name} has entries outside [0, 1]")
            if arr.size and np.max(np.abs(arr.sum(axis=1) - 1.0)) > tol:
                raise NonStochasticRow(f"{name} has a row not summing to 1")
        if np.any(self.V < -tol) or np.any(self.V > 1 + tol):
            raise OutOfRange("V has entries outside [0, 1]")


@dataclass
class DegreePlan:
    """Expected degrees ``theta`` (descending) and running actual degrees."""

    theta: np.ndarray
    theta_prime: np.ndarray = field(default=None)

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=np.int64)
        if self.theta_prime is None:
            self.theta_prime = np.zeros_like(self.theta)

    @property
    def n(self) -> int:
        return self.theta.size


def normalize_edges(edges, n: Optional[int] = None) -> np.ndarray:
    """Return a sorted, de-duplicated ``(m, 2)`` array of pairs with i < j.

    Self-loops are dropped.
    """
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if e.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    lo = np.minimum(e[:, 0], e[:, 1])
    hi = np.maximum(e[:, 0], e[:, 1])
    keep = lo != hi
    lo, hi = lo[keep], hi[keep]
    if n is None:
        n = int(hi.max()) + 1 if hi.size else 0
    key = np.unique(lo * n + hi)
    return np.column_stack([key // n, key % n]).astype(np.int64)


@dataclass(frozen=True)
class AttributedGraph:
    """Undirected simple graph with attributes ``X`` and 1-based labels ``C``.

    Edges are stored once as sorted pairs ``(i, j)`` with ``i < j``.
    """

    n: int
    edges: np.ndarray
    C: np.ndarray
    X: np.ndarray = None

    def __post_init__(self):
        object.__setattr__(self, "edges", np.asarray(self.edges, dtype=np.int64).reshape(-1, 2))
        object.__setattr__(self, "C", np.asarray(self.C, dtype=np.int64))
        if self.X is None:
            object.__setattr__(self, "X", np.zeros((self.n, 0)))
        else:
            object.__setattr__(self, "X", np.asarray(self.X, dtype=float))

    @classmethod
    def from_edges(cls, n, edges, C, X=None) -> "AttributedGraph":
        return cls(n=n, edges=normalize_edges(edges, n), C=C, X=X)

    @property
    def m(self) -> int:
        return self.edges.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    @property
    def k(self) -> int:
        return int(self.C.max()) if self.C.size else 0

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n)

    def adjacency(self) -> sp.csr_matrix:
        """Symmetric CSR adjacency."""
        i, j = self.edges[:, 0], self.edges[:, 1]
        data = np.ones(2 * self.m, dtype=np.int8)
        return sp.csr_matrix(
            (data, (np.concatenate([i, j]), np.concatenate([j, i]))), shape=(self.n, self.n)
        )

    def class_members(self, l: int) -> np.ndarray:
        return np.flatnonzero(self.C == l)

    def validate(self, k: Optional[int] = None) -> None:
        """Scan the edge set and labels; raise on any broken invariant."""
        e = self.edges
        if e.size:
            if e.min() < 0 or e.max() >= self.n:
                raise OutOfRange("edge endpoint outside [0, n)")
            if np.any(e[:, 0] == e[:, 1]):
                raise ConfigError("self-loop present")
            if np.any(e[:, 0] > e[:, 1]):
                raise ConfigError("edge not stored as i < j")
            key = e[:, 0] * self.n + e[:, 1]
            if np.any(np.diff(key) <= 0):
                raise ConfigError("edges unsorted or duplicated")
        if self.C.shape != (self.n,):
            raise BadShape(f"labels must have length {self.n}")
        k = self.k if k is None else k
        if self.C.size and (self.C.min() < 1 or self.C.max() > k):
            raise OutOfRange(f"labels must lie in 1..{k}")
        if self.X.shape[0] != self.n:
            raise BadShape("attribute matrix row count differs from n")


@dataclass
class ClassFeatureReport:
    """Measured class features of a concrete graph."""

    M_meas: np.ndarray
    D_meas: np.ndarray
    rho_meas: np.ndarray
    H_meas: Optional[np.ndarray] = None
    isolated_per_class: Optional[np.ndarray] = None
