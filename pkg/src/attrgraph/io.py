"""Plain-text readers and writers for edge lists, labels and attributes.

Edge lists hold one ``i<TAB>j`` pair per line (0-based, ``i < j``, sorted);
labels hold ``node<TAB>label`` lines with 1-based labels; attributes are a
CSV with header ``node,a0,...`` and values at 9 significant digits.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import GraphFormatError
from .model import AttributedGraph, normalize_edges

CHUNK = 65536


def _ints(path, width: int, what: str):
    """Yield ``(lineno, fields)`` for non-blank, non-comment lines."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != width:
                raise GraphFormatError(f"{path}:{lineno}: expected {width} fields in {what} line")
            try:
                yield lineno, [int(p) for p in parts]
            except ValueError:
                raise GraphFormatError(f"{path}:{lineno}: non-integer field in {what} line") from None


def read_labels(path) -> np.ndarray:
    """1-based labels indexed by node; every node 0..n-1 must appear exactly once."""
    seen = {}
    for lineno, (node, label) in _ints(path, 2, "label"):
        if node < 0:
            raise GraphFormatError(f"{path}:{lineno}: negative node id {node}")
        if label < 1:
            raise GraphFormatError(f"{path}:{lineno}: label of node {node} must be >= 1")
        if node in seen:
            raise GraphFormatError(f"{path}:{lineno}: node {node} labeled twice")
        seen[node] = label
    if not seen:
        raise GraphFormatError(f"{path}: no labels found")
    n = max(seen) + 1
    if len(seen) != n:
        missing = next(i for i in range(n) if i not in seen)
        raise GraphFormatError(f"{path}: node {missing} has no label")
    C = np.empty(n, dtype=np.int64)
    for node, label in seen.items():
        C[node] = label
    return C


def read_edges(path, n: int = None) -> np.ndarray:
    """Edge array normalized to sorted ``i < j`` pairs; endpoints checked against ``n``."""
    pairs = []
    for lineno, (i, j) in _ints(path, 2, "edge"):
        if i < 0 or j < 0 or (n is not None and max(i, j) >= n):
            bad = i if (i < 0 or (n is not None and i >= n)) else j
            raise GraphFormatError(f"{path}:{lineno}: node {bad} has no label")
        pairs.append((i, j))
    return normalize_edges(np.array(pairs, dtype=np.int64).reshape(-1, 2), n)


def read_attributes(path, n: int) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if not header or header[0] != "node":
            raise GraphFormatError(f"{path}: header must start with 'node'")
        d = len(header) - 1
        X = np.full((n, d), np.nan)
        for lineno, line in enumerate(fh, 2):
            if not line.strip():
                continue
            parts = line.strip().split(",")
            if len(parts) != d + 1:
                raise GraphFormatError(f"{path}:{lineno}: expected {d + 1} fields")
            try:
                node = int(parts[0])
                X[node] = [float(v) for v in parts[1:]]
            except (ValueError, IndexError):
                raise GraphFormatError(f"{path}:{lineno}: malformed attribute row") from None
    missing = np.flatnonzero(np.isnan(X).any(axis=1)) if d else np.array([], int)
    if missing.size:
        raise GraphFormatError(f"{path}: node {int(missing[0])} has no attributes")
    return X


def read_graph(graph_path, labels_path, attrs_path=None) -> AttributedGraph:
    C = read_labels(labels_path)
    n = C.size
    edges = read_edges(graph_path, n)
    X = read_attributes(attrs_path, n) if attrs_path is not None else None
    return AttributedGraph(n, edges, C, X)


def write_edges(path, edges) -> None:
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for s in range(0, edges.shape[0], CHUNK):
            block = edges[s:s + CHUNK]
            fh.write("".join(f"{i}\t{j}\n" for i, j in block.tolist()))


def write_labels(path, C) -> None:
    C = np.asarray(C, dtype=np.int64)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for s in range(0, C.size, CHUNK):
            fh.write("".join(f"{s + i}\t{c}\n" for i, c in enumerate(C[s:s + CHUNK].tolist())))


def write_attributes(path, X) -> None:
    X = np.asarray(X, dtype=float)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(["node"] + [f"a{j}" for j in range(X.shape[1])]) + "\n")
        for s in range(0, X.shape[0], CHUNK):
            rows = X[s:s + CHUNK].tolist()
            fh.write("".join(
                f"{s + i}," + ",".join(f"{v:.9g}" for v in row) + "\n" for i, row in enumerate(rows)
            ))


def jsonable(obj):
    """Convert numpy values (and NaN/inf) into plain JSON-safe Python."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def write_json(path, doc) -> None:
    Path(path).write_text(json.dumps(jsonable(doc), indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")
