"""End-to-end generation: latent factors -> adjustment -> edges -> attributes.

Seeding: the master seed feeds ``np.random.SeedSequence(seed)``, which is
spawned into five child streams used, in order, for class sizes, labels,
membership rows, edges and attributes. A phase therefore draws the same
numbers regardless of how much randomness other phases consume.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import adjust, attributes, edges, latent
from .model import AttributedGraph, DegreePlan, GeneratorConfig, LatentFactors, validate_config

STREAMS = ("class_sizes", "labels", "membership", "edges", "attributes")
THREADS_ENV = "GENCAT_THREADS"


def seed_streams(seed: int) -> dict:
    children = np.random.SeedSequence(seed).spawn(len(STREAMS))
    return {name: np.random.default_rng(child) for name, child in zip(STREAMS, children)}


def thread_cap() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


@dataclass
class GenerationResult:
    graph: AttributedGraph
    factors: LatentFactors
    plan: DegreePlan
    rho: np.ndarray
    phi_d: float
    class_adjustments: list
    attr_T: np.ndarray
    attr_losses: np.ndarray
    edge_stats: edges.EdgeGenerationStats
    n_clamped: int = 0
    timings: dict = field(default_factory=dict)

    @property
    def degree_mape(self) -> float:
        mask = self.plan.theta > 0
        return edges.degree_mape(self.plan.theta[mask], self.plan.theta_prime[mask])


def build_latent(cfg: GeneratorConfig, streams: dict):
    """Class sizes, labels and the initial ``U``, ``U'``, ``V``."""
    rho = latent.sample_class_sizes(
        cfg.class_size_mode, cfg.k, streams["class_sizes"], phi_C=cfg.phi_C,
        mean=cfg.class_size_mean, dev=cfg.class_size_dev, rho=cfg.rho,
    )
    C = latent.assign_labels(rho, cfg.n, streams["labels"])
    U = latent.init_membership(C, cfg.M, cfg.D, streams["membership"])
    U_prime = latent.derive_connection_proportions(U, C, cfg.M) if cfg.k > 1 else U.copy()
    V = latent.init_attr_proportions(cfg.H)
    return rho, C, LatentFactors(U, U_prime, V)


def adjust_factors(factors: LatentFactors, C, M, threads: int = 1) -> list:
    """Per-class temperature search; rows of distinct classes are disjoint."""
    k = M.shape[0]
    if k == 1:
        return []
    positive = latent.topology_types(M)

    def one(l):
        return adjust.adjust_class(factors.U, factors.U_prime, C, M, l, bool(positive[l - 1]))

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(one, range(1, k + 1)))
    return [one(l) for l in range(1, k + 1)]


def generate(cfg: GeneratorConfig, *, adjust_proportions: bool = True,
             edge_method: str = "table", threads: int = None) -> GenerationResult:
    """Run the full generator for one configuration."""
    validate_config(cfg)
    if cfg.m > cfg.max_edges:
        raise edges.InfeasibleBudget(f"m={cfg.m} exceeds the complete graph on {cfg.n} nodes")
    threads = thread_cap() if threads is None else threads
    streams = seed_streams(cfg.seed)
    timings = {}

    t0 = time.perf_counter()
    rho, C, factors = build_latent(cfg, streams)
    timings["latent"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    adjustments = adjust_factors(factors, C, cfg.M, threads) if adjust_proportions else []
    attr_T = np.ones(cfg.d)
    attr_losses = np.zeros(cfg.d)
    if cfg.d > 0 and adjust_proportions:
        P = adjust.class_mean_membership(factors.U, C, cfg.k)
        factors.V, attr_T, attr_losses = adjust.adjust_attributes(factors.V, P, cfg.H)
    timings["adjust"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    if cfg.degrees is not None:
        phi_d = float("nan")
        plan = edges.build_degree_plan(cfg.n, degrees=cfg.degrees)
    else:
        phi_d = edges.fit_degree_exponent(cfg.n, cfg.m)
        plan = edges.build_degree_plan(cfg.n, phi_d, cfg.m)
    tables = None
    if edge_method == "table":
        tables = edges.build_sampler_tables(factors.U_prime, cfg.n, cfg.k)
    timings["tables"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    edge_arr, edge_stats = edges.generate_edges(
        factors.U, factors.U_prime, plan, cfg.k, cfg.r, streams["edges"],
        method=edge_method, tables=tables,
    )
    del tables
    timings["edges"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    n_clamped = 0
    if cfg.d > 0:
        base = attributes.base_attributes(factors.U, factors.V)
        if cfg.attr_dist == "normal":
            X = attributes.apply_normal(base, cfg.omega, streams["attributes"])
        else:
            X, n_clamped = attributes.apply_bernoulli(base, streams["attributes"])
    else:
        X = np.zeros((cfg.n, 0))
    timings["attributes"] = time.perf_counter() - t0

    graph = AttributedGraph(cfg.n, edge_arr, C, X)
    return GenerationResult(graph, factors, plan, rho.rho, phi_d, adjustments, attr_T,
                            attr_losses, edge_stats, n_clamped, timings)
