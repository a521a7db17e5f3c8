"""Timing harness producing algorithm comparison tables."""
from __future__ import annotations

import csv
import io
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .mesh import MeshGraph, NodeId, Path
from .routing import HashList, RoutingSession, hash_list_route
from .search import (bidirectional_shortest, dfs_all_paths, dfs_cycles,
                     dfs_shortest_path, dijkstra_baseline)
from .topology import network_from_config


class BenchError(ValueError):
    pass


# mode -> (table label, complexity label, aggregate)
ALGORITHMS: Dict[str, Tuple[str, str, str]] = {
    "dijkstra": ("Modified Dijkstra", "O(V^2)", "mean"),
    "bidirectional": ("Modified Bidirectional Search", "O(2^(d/2))", "mean"),
    "dfs-shortest": ("Modified DFS", "O(V+E)", "mean"),
    "dfs-guided": ("Modified DFS, distance-guided", "O(V+E)", "mean"),
    "dfs-multi": ("Modified DFS", "O(V+E)", "total"),
    "dfs-all": ("Modified DFS", "O(V+E)", "total"),
    "dfs-cycles": ("Modified DFS", "O(V+E)", "total"),
    "hash-list": ("Hash list lookup", "O(E)", "mean"),
}

COLUMNS = ("Algorithm", "Complexity", "Total MZIs", "Maximum MZIs Traversed", "Number of Paths Searched", "Time Taken")


@dataclass
class BenchConfig:
    network: dict = field(default_factory=lambda: {"kind": "hex", "num_cells": 5})
    algorithms: Sequence[str] = ("dijkstra", "bidirectional", "dfs-shortest", "dfs-multi")
    seed: int = 0
    count: int = 100
    repetitions: int = 1
    warmup: int = 1
    multi_pairs: int = 7
    include_parallel: bool = False
    parallel: bool = False
    workers: Optional[int] = None
    # when set: multi-route total must stay below this many single shortest searches
    amortization_factor: Optional[float] = None

    def __post_init__(self):
        if self.count < 1 or self.repetitions < 1:
            raise ValueError("count and repetitions must be >= 1")
        if not self.algorithms:
            raise ValueError("no algorithms selected")
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown:
            raise ValueError(f"unknown algorithms {unknown}; choose from {sorted(ALGORITHMS)}")

    @classmethod
    def from_dict(cls, data: dict) -> "BenchConfig":
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        if "algorithms" in known:
            known["algorithms"] = tuple(known["algorithms"])
        return cls(**known)


@dataclass
class BenchRow:
    mode: str
    algorithm: str
    complexity: str
    total_units: int
    max_units: int
    paths_found: int
    time_s: float
    aggregate: str
    samples: int
    failures: int = 0

    def cells(self) -> List[str]:
        return [self.algorithm, self.complexity, str(self.total_units), str(self.max_units),
                str(self.paths_found), format_time(self.time_s)]


@dataclass
class BenchReport:
    rows: List[BenchRow]
    pairs: List[Tuple[NodeId, NodeId]]
    config: Optional[BenchConfig] = None
    checks: Dict[str, bool] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def row(self, mode: str) -> BenchRow:
        for r in self.rows:
            if r.mode == mode:
                return r
        raise KeyError(mode)


def format_time(seconds: float) -> str:
    if seconds >= 1.0:
        return f"{seconds:.3g} s"
    return f"{seconds * 1e3:.3g} ms"


def parallel_ports(graph: MeshGraph, a: NodeId, b: NodeId) -> bool:
    """True when a and b are the two ports on one side of the same unit."""
    for unit in graph.node_owner.get(a, ()):
        n = graph.units[unit].nodes
        if {a, b} in ({n["e"], n["f"]}, {n["g"], n["h"]}):
            return True
    return False


def sample_pairs(graph: MeshGraph, count: int, seed: int, *, include_parallel: bool = True) -> List[Tuple[NodeId, NodeId]]:
    """Deterministic ordered port pairs; sampled with replacement once all pairs are used."""
    ports = list(graph.inputs) if graph.inputs else graph.ports()
    outs = list(graph.outputs) if graph.outputs else ports
    candidates = [(s, t) for s in ports for t in outs
                  if s != t and (include_parallel or not parallel_ports(graph, s, t))]
    if not candidates:
        raise BenchError("no port pairs to sample")
    rng = random.Random(seed)
    if count <= len(candidates):
        return rng.sample(candidates, count)
    return [rng.choice(candidates) for _ in range(count)]


def _disjoint_pairs(pairs, k):
    used, out = set(), []
    for s, t in pairs:
        if s in used or t in used:
            continue
        out.append((s, t))
        used.update((s, t))
        if len(out) == k:
            break
    return out


def _timed(fn: Callable, repetitions: int):
    result = None
    total = 0.0
    for _ in range(repetitions):
        t0 = time.perf_counter()
        result = fn()
        total += time.perf_counter() - t0
    return result, total / repetitions


def _single(mode: str, graph: MeshGraph, s, t):
    if mode == "dfs-shortest":
        return dfs_shortest_path(graph, s, t)
    if mode == "dfs-guided":
        return dfs_shortest_path(graph, s, t, guided=True)
    if mode == "dijkstra":
        return dijkstra_baseline(graph, s, t)
    if mode == "bidirectional":
        return bidirectional_shortest(graph, s, t)
    raise KeyError(mode)


def _measure_chunk(args):
    mode, graph, pairs, repetitions, warmup = args
    out = []
    for s, t in pairs:
        for _ in range(warmup):
            _single(mode, graph, s, t)
        res, dt = _timed(lambda: _single(mode, graph, s, t), repetitions)
        out.append((res, dt))
    return out


def _run_single(mode, graph, pairs, cfg: BenchConfig):
    if cfg.parallel and len(pairs) > 1:
        workers = cfg.workers or 2
        chunks = [pairs[k::workers] for k in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_measure_chunk, [(mode, graph, c, cfg.repetitions, cfg.warmup) for c in chunks]))
        # restore sample order
        merged = [None] * len(pairs)
        for k, part in enumerate(parts):
            for j, item in enumerate(part):
                merged[k + j * workers] = item
        return merged
    return _measure_chunk((mode, graph, pairs, cfg.repetitions, cfg.warmup))


def run_bench(cfg: BenchConfig, graph: Optional[MeshGraph] = None) -> BenchReport:
    graph = graph if graph is not None else network_from_config(cfg.network)
    rows: List[BenchRow] = []
    every = sample_pairs(graph, cfg.count, cfg.seed, include_parallel=True)
    clean = sample_pairs(graph, cfg.count, cfg.seed, include_parallel=cfg.include_parallel)
    if cfg.amortization_factor is not None and "dfs-multi" not in cfg.algorithms:
        raise BenchError("amortization check needs the dfs-multi row")
    for mode in cfg.algorithms:
        label, complexity, aggregate = ALGORITHMS[mode]
        found, longest, failures, times = 0, 0, 0, []
        if mode in ("dfs-shortest", "dfs-guided", "dijkstra", "bidirectional"):
            pairs = clean if mode == "bidirectional" else every
            for res, dt in _run_single(mode, graph, pairs, cfg):
                times.append(dt)
                if isinstance(res, Path):
                    found += 1
                    longest = max(longest, res.units_traversed)
                else:
                    failures += 1
            samples = len(pairs)
        elif mode == "dfs-multi":
            pairs = _disjoint_pairs(every, cfg.multi_pairs)
            for _ in range(cfg.warmup):
                RoutingSession(graph).route_multi(pairs)
            res, dt = _timed(lambda: RoutingSession(graph).route_multi(pairs), cfg.repetitions)
            times.append(dt)
            found = res.success_count
            failures = len(pairs) - found
            longest = max((p.units_traversed for p in res.routed), default=0)
            samples = len(pairs)
        elif mode == "dfs-all":
            pairs = every[: max(1, min(len(every), cfg.count))]
            for s, t in pairs:
                res, dt = _timed(lambda: dfs_all_paths(graph, s, t), cfg.repetitions)
                times.append(dt)
                found += len(res)
                longest = max([longest] + [p.units_traversed for p in res])
            samples = len(pairs)
        elif mode == "dfs-cycles":
            # a port has a single edge, so cycles need interior dummy parents
            ports = set(graph.ports())
            interior = [n for n in graph.dummies() if n not in ports]
            parents = random.Random(cfg.seed).sample(interior, min(cfg.count, len(interior)))
            for p in parents:
                res, dt = _timed(lambda: dfs_cycles(graph, p), cfg.repetitions)
                times.append(dt)
                found += len(res)
                longest = max([longest] + [c.units_traversed for c in res])
            samples = len(parents)
        else:  # hash-list
            # tables hold every path per pair, so only a handful of pairs are stored
            subset = list(dict.fromkeys(every))[:10]
            table = HashList({(s, t): dfs_all_paths(graph, s, t).paths for s, t in subset},
                             graph.fingerprint(), {"pairs": len(subset)})
            for s, t in subset:
                res, dt = _timed(lambda: hash_list_route(table, RoutingSession(graph), (s, t)), cfg.repetitions)
                times.append(dt)
                if isinstance(res, Path):
                    found += 1
                    longest = max(longest, res.units_traversed)
                else:
                    failures += 1
            samples = len(subset)
        if found == 0:
            raise BenchError(f"{mode}: no sampled pair was routable")
        arr = np.asarray(times)
        total = float(arr.sum())
        value = total if aggregate == "total" else float(arr.mean())
        rows.append(BenchRow(mode, label, complexity, graph.num_units, longest, found, value, aggregate,
                             samples, failures))
    report = BenchReport(rows, every, cfg)
    if cfg.amortization_factor is not None:
        # compare against the same pairs searched one at a time on a fresh graph
        multi = report.row("dfs-multi")
        pairs = _disjoint_pairs(every, cfg.multi_pairs)
        single = float(np.mean([t for _, t in _measure_chunk(("dfs-shortest", graph, pairs, cfg.repetitions,
                                                                  cfg.warmup))]))
        report.checks["amortization"] = multi.time_s < cfg.amortization_factor * single
    return report


def emit_table(report: BenchReport, fmt: str = "markdown") -> str:
    if not report.rows:
        raise ValueError("empty report")
    fmt = fmt.lower()
    body = [r.cells() for r in report.rows]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        w.writerows(body)
        return buf.getvalue()
    if fmt in ("markdown", "md"):
        lines = ["| " + " | ".join(COLUMNS) + " |", "|" + "|".join("---" for _ in COLUMNS) + "|"]
        lines += ["| " + " | ".join(row) + " |" for row in body]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown table format {fmt!r}")
