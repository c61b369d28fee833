"""Command-line front end.

    attrgraph generate --config cfg.json --out DIR [--seed N]
    attrgraph reproduce --graph edges.tsv --labels labels.tsv [--nodes N --edges M] --out DIR [--seed N]
    attrgraph measure --graph edges.tsv --labels labels.tsv [--attrs attrs.csv]

Exit codes: 0 success, 1 validation error, 2 I/O or parse error, 3 infeasible
parameters. Nothing is written to ``--out`` unless generation succeeded.
"""

from __future__ import annotations

import argparse
import json
import resource
import sys
import time
from pathlib import Path

import numpy as np

from . import io, presets
from .errors import ConfigError, GeneratorError, GraphFormatError, Infeasible
from .model import GeneratorConfig
from .pipeline import STREAMS, generate
from .stats import community_stats, extract_params, mean_deviation_losses, measure_class_features

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_INFEASIBLE = 0, 1, 2, 3

CONFIG_KEYS = {
    "n", "m", "k", "M", "D", "d", "H", "phi_C", "omega", "r", "attr_dist",
    "class_size_mode", "class_size_mean", "class_size_dev", "rho", "degrees", "seed",
}
EDGES_FILE = "edges.tsv"
LABELS_FILE = "labels.tsv"
ATTRS_FILE = "attributes.csv"
REPORT_FILE = "report.json"


def _aux_rng(seed: int, slot: int):
    """Extra streams beyond the generator's own: spawn children after ``STREAMS``."""
    ss = np.random.SeedSequence(seed, spawn_key=(len(STREAMS) + slot,))
    return np.random.default_rng(ss)


def _apply_preset(params: dict, seed: int):
    if isinstance(params, str):
        params = {"name": params}
    params = dict(params)
    name = params.pop("name", None)
    if name == "lfr":
        return presets.lfr_preset(int(params["k"]), float(params["mu"]))
    if name == "dcsbm":
        return presets.dcsbm_preset(params["M"])
    if name == "diagonal":
        diag = params["diag"]
        k = int(params.get("k", len(diag)))
        kw = {}
        if "dev_range" in params:
            kw["dev_range"] = tuple(params["dev_range"])
        if "offdiag_dev" in params:
            kw["offdiag_dev"] = float(params["offdiag_dev"])
        return presets.diagonal_preset(k, diag, _aux_rng(seed, 0), **kw)
    raise ConfigError(f"unknown preset {name!r}; expected lfr, dcsbm or diagonal")


def config_from_dict(doc: dict, seed: int = None) -> GeneratorConfig:
    """Build a :class:`GeneratorConfig` from a parsed JSON document.

    A ``"preset"`` entry (name plus parameters) supplies ``M`` and ``D``;
    ``k`` defaults to their size.
    """
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    doc = dict(doc)
    seed = int(doc.get("seed", 0) if seed is None else seed)
    preset = doc.pop("preset", None)
    unknown = sorted(set(doc) - CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    if preset is not None:
        if isinstance(preset, dict) and "k" not in preset and "k" in doc:
            preset = dict(preset, k=doc["k"])
        try:
            M, D = _apply_preset(preset, seed)
        except KeyError as exc:
            raise ConfigError(f"preset is missing parameter {exc}") from None
        doc.setdefault("M", M)
        doc.setdefault("D", D)
        # equal off-diagonals only balance cross-class edge counts when the
        # classes have equal volume, so LFR defaults to equal class sizes
        sized = {"class_size_mode", "rho", "phi_C"} & set(doc)
        name = preset.get("name") if isinstance(preset, dict) else preset
        if name == "lfr" and not sized:
            k = len(doc["M"])
            doc["class_size_mode"] = "explicit"
            doc["rho"] = np.full(k, 1.0 / k)
    missing = [key for key in ("n", "m", "M", "D") if key not in doc]
    if missing:
        raise ConfigError(f"config is missing: {', '.join(missing)}")
    doc.setdefault("k", len(doc["M"]))
    doc["seed"] = seed
    try:
        return GeneratorConfig(**doc)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, GeneratorError):
            raise
        raise ConfigError(str(exc)) from None


def load_config(path, seed: int = None) -> GeneratorConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return config_from_dict(doc, seed)


def measurement_block(G, k: int, seed: int = 0) -> dict:
    """Class features plus community statistics; schema shared by every command."""
    feats = measure_class_features(G, k, strict=False)
    comm = community_stats(G, _aux_rng(seed, 1))
    flags = list(comm.flags)
    undefined = [int(l + 1) for l in np.flatnonzero(np.isnan(feats.M_meas).any(axis=1))]
    if undefined:
        flags.append("class_preference_undefined")
    return {
        "n": G.n,
        "m": G.m,
        "k": k,
        "M": feats.M_meas,
        "D": feats.D_meas,
        "rho": feats.rho_meas,
        "H": feats.H_meas,
        "isolated_per_class": feats.isolated_per_class,
        "undefined_classes": undefined,
        "community": comm.as_dict(),
        "flags": flags,
    }


def _peak_memory_mb() -> float:
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024.0


def _generation_summary(res, m_requested: int) -> dict:
    plan = res.plan
    return {
        "m_requested": m_requested,
        "m_realized": res.graph.m,
        "edge_gap": m_requested - res.graph.m,
        "planned_edges": float(plan.theta.sum()) / 2.0,
        "degree_mape": res.degree_mape,
        "degree_exponent": res.phi_d,
        "temperatures": {str(a.l): a.T_min for a in res.class_adjustments},
        "attribute_temperatures": res.attr_T,
        "clamped_entries": res.n_clamped,
        "edge_stats": {
            "rounds": res.edge_stats.rounds,
            "candidates": res.edge_stats.candidates,
            "rejected_duplicate": res.edge_stats.rejected_duplicate,
            "rejected_self_loop": res.edge_stats.rejected_self_loop,
            "rejected_budget": res.edge_stats.rejected_budget,
        },
        "phase_seconds": res.timings,
    }


def _write_outputs(out_dir: Path, graph) -> dict:
    out_dir.mkdir(parents=True, exist_ok=True)
    files = {"edges": EDGES_FILE, "labels": LABELS_FILE}
    io.write_edges(out_dir / EDGES_FILE, graph.edges)
    io.write_labels(out_dir / LABELS_FILE, graph.C)
    if graph.d > 0:
        io.write_attributes(out_dir / ATTRS_FILE, graph.X)
        files["attributes"] = ATTRS_FILE
    return files


def cmd_generate(config_path, out_dir, seed=None) -> dict:
    t0 = time.perf_counter()
    cfg = load_config(config_path, seed)
    res = generate(cfg)
    measured = measurement_block(res.graph, cfg.k, cfg.seed)
    losses = mean_deviation_losses(cfg.M, cfg.D, measured=measure_class_features(res.graph, cfg.k, strict=False))
    files = _write_outputs(Path(out_dir), res.graph)
    report = {
        "command": "generate",
        "seed": cfg.seed,
        "n": cfg.n,
        **_generation_summary(res, cfg.m),
        "measured": measured,
        "target": {"M": cfg.M, "D": cfg.D, "rho": res.rho, "H": cfg.H if cfg.d else None},
        "per_class_l_mean": losses.per_class_mean,
        "l_mean": losses.l_mean,
        "files": files,
    }
    report["wall_time_s"] = time.perf_counter() - t0
    report["peak_memory_mb"] = _peak_memory_mb()
    io.write_json(Path(out_dir) / REPORT_FILE, report)
    return report


def cmd_reproduce(graph_path, labels_path, out_dir, new_n=None, new_m=None, seed=0) -> dict:
    t0 = time.perf_counter()
    G = io.read_graph(graph_path, labels_path)
    k = G.k
    params = extract_params(G, k)
    n = params.n if new_n is None else int(new_n)
    m = params.m if new_m is None else int(new_m)
    cfg = GeneratorConfig(
        n=n, m=m, k=k, M=params.M, D=params.D, class_size_mode="explicit",
        rho=params.rho, degrees=params.rescaled_degrees(n, m), seed=int(seed),
    )
    res = generate(cfg)
    before = measurement_block(G, k, cfg.seed)
    after = measurement_block(res.graph, k, cfg.seed)
    feats = measure_class_features(res.graph, k, strict=False)
    losses = mean_deviation_losses(params.M, params.D, measured=feats)
    delta = {}
    for key, val in before["community"].items():
        if isinstance(val, (int, float)) and not isinstance(val, bool):
            delta[key] = after["community"][key] - val
    files = _write_outputs(Path(out_dir), res.graph)
    report = {
        "command": "reproduce",
        "seed": cfg.seed,
        "n": n,
        **_generation_summary(res, m),
        "input": before,
        "measured": after,
        "comparison": {
            "mse_M": losses.mse_mean,
            "mse_D": losses.mse_dev,
            "per_class_l_mean": losses.per_class_mean,
            "community_delta": delta,
        },
        "files": files,
    }
    report["wall_time_s"] = time.perf_counter() - t0
    report["peak_memory_mb"] = _peak_memory_mb()
    io.write_json(Path(out_dir) / REPORT_FILE, report)
    return report


def cmd_measure(graph_path, labels_path, attrs_path=None) -> dict:
    G = io.read_graph(graph_path, labels_path, attrs_path)
    return {"command": "measure", "measured": measurement_block(G, G.k)}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="attrgraph", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a graph from a JSON config")
    g.add_argument("--config", required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--seed", type=int, default=None, help="overrides the config's seed")

    r = sub.add_parser("reproduce", help="regenerate a labeled graph's class structure")
    r.add_argument("--graph", required=True)
    r.add_argument("--labels", required=True)
    r.add_argument("--nodes", type=int, default=None)
    r.add_argument("--edges", type=int, default=None)
    r.add_argument("--out", required=True)
    r.add_argument("--seed", type=int, default=0)

    m = sub.add_parser("measure", help="print class features and community statistics")
    m.add_argument("--graph", required=True)
    m.add_argument("--labels", required=True)
    m.add_argument("--attrs", default=None)
    return p


def _summary_line(report: dict) -> str:
    if report["command"] == "measure":
        return json.dumps(io.jsonable(report), indent=2, sort_keys=True)
    return (f"{report['command']}: n={report['n']} edges={report['m_realized']}"
            f" (requested {report['m_requested']}) degree MAPE={report['degree_mape']:.3g}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "generate":
            report = cmd_generate(args.config, args.out, args.seed)
        elif args.command == "reproduce":
            report = cmd_reproduce(args.graph, args.labels, args.out, args.nodes, args.edges,
                                   args.seed)
        else:
            report = cmd_measure(args.graph, args.labels, args.attrs)
    except Infeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except GraphFormatError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_IO
    except GeneratorError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(_summary_line(report))
    flags = report.get("measured", {}).get("flags", [])
    if flags:
        print(f"warnings: {', '.join(flags)}", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
