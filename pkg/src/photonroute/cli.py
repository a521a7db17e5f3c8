"""Command-line interface.

Every command prints JSON to stdout.  Exit status is 0 on success, 1 when a
search or route finds nothing, and 2 for usage errors (bad node names,
missing files, unknown modes).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional, Sequence

from . import serialize
from .bench import BenchConfig, BenchError, emit_table, run_bench
from .mesh import MeshGraph, NodeIdError, Path, UnknownNode, format_node_id, parse_node_id
from .routing import (HashList, HashListMismatch, RoutingSession, Unroutable, build_hash_list,
                      enumerate_fabric_permutations, hash_list_route, parse_fault_strategy)
from .search import (NonphysicalIntersection, SearchError, bidirectional_shortest, dfs_all_paths, dfs_cycles,
                     dfs_fixed_weight_cycle, dfs_fixed_weight_path, dfs_shortest_cycle, dfs_shortest_path,
                     dijkstra_baseline)
from .topology import SwitchFabricSpec, build_switch_fabric, network_from_config

NET_ENV = "PHOTONROUTE_NET"


class UsageError(Exception):
    pass


class NothingFound(Exception):
    pass


def _emit(obj, out=None):
    (out or sys.stdout).write(json.dumps(obj, indent=2, sort_keys=False) + "\n")


def _write(path: str, text: str):
    with open(path, "w") as fh:
        fh.write(text)


def _read_json(path: str, what: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise UsageError(f"{what}: file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what}: {path} is not valid JSON ({exc.msg})") from None


def _load_net(args) -> MeshGraph:
    path = args.net or os.environ.get(NET_ENV)
    if not path:
        raise UsageError(f"--net: no network file given and {NET_ENV} is not set")
    data = _read_json(path, "--net")
    try:
        if data.get("format") == serialize.GRAPH_FORMAT:
            return serialize.graph_from_dict(data)
        return network_from_config(data)
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"--net: cannot load {path}: {exc}") from None


def _node(graph: MeshGraph, text: str, option: str):
    try:
        return graph.resolve(parse_node_id(text))
    except NodeIdError as exc:
        raise UsageError(f"{option}: {exc}") from None
    except UnknownNode:
        raise UsageError(f"{option}: node {text!r} is not in the network") from None


_ROLE_OPTION = {"source": "--from", "target": "--to", "parent": "--parent"}


def _search_usage(exc: Exception) -> UsageError:
    msg = str(exc)
    option = _ROLE_OPTION.get(msg.split(" ", 1)[0], "--from/--to")
    return UsageError(f"{option}: {msg}")


def _mode(text: str, option: str = "--mode"):
    if text in ("shortest", "all"):
        return text, None
    if text.startswith("fixed:"):
        try:
            w = int(text.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"{option}: bad weight in {text!r}") from None
        if w < 1:
            raise UsageError(f"{option}: weight must be >= 1")
        return "fixed", w
    raise UsageError(f"{option}: unknown mode {text!r} (shortest, all, fixed:W)")


def _path_record(p) -> dict:
    return p.as_dict()


def _maybe_dot(args, graph, paths):
    if getattr(args, "dot", None):
        _write(args.dot, serialize.to_dot(graph, paths))


# commands -------------------------------------------------------------------

def cmd_build(args):
    if args.config:
        config = _read_json(args.config, "--config")
    else:
        config = {"kind": "hex", "num_cells": args.cells}
        if args.r_inner is not None:
            config["r_inner"] = args.r_inner
        if args.tolerance is not None:
            config["merge_tolerance"] = args.tolerance
    try:
        graph = network_from_config(config)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"build: {exc}") from None
    serialize.save_graph(graph, args.out)
    _emit({"out": args.out, "units": graph.num_units, "nodes": len(graph.nodes), "edges": graph.num_edges,
           "ports": len(graph.ports()), "fingerprint": graph.fingerprint()})


def cmd_route(args):
    graph = _load_net(args)
    s = _node(graph, args.source, "--from")
    t = _node(graph, args.target, "--to")
    mode, weight = _mode(args.mode)
    try:
        if mode == "all":
            if args.algo != "dfs":
                raise UsageError("--algo: only dfs enumerates all paths")
            paths = dfs_all_paths(graph, s, t).paths
        elif mode == "fixed":
            if args.algo != "dfs":
                raise UsageError("--algo: only dfs supports fixed-weight search")
            p = dfs_fixed_weight_path(graph, s, t, weight)
            paths = [p] if p else []
        elif args.algo == "bidir":
            res = bidirectional_shortest(graph, s, t)
            if isinstance(res, NonphysicalIntersection):
                _emit({"nonphysical_intersection": format_node_id(res.node),
                       "nodes": [format_node_id(n) for n in res.nodes]})
                raise NothingFound()
            paths = [res] if res else []
        elif args.algo == "dijkstra":
            p = dijkstra_baseline(graph, s, t)
            paths = [p] if p else []
        else:
            p = dfs_shortest_path(graph, s, t, guided=args.guided)
            paths = [p] if p else []
    except SearchError as exc:
        raise _search_usage(exc) from None
    _maybe_dot(args, graph, paths)
    _emit({"paths": [_path_record(p) for p in paths]})
    if not paths:
        raise NothingFound()


def _read_pairs(path: str):
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except FileNotFoundError:
        raise UsageError(f"--pairs: file not found: {path}") from None
    pairs = []
    for k, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise UsageError(f"--pairs: line {k}: expected 'source target'")
        pairs.append((parts[0], parts[1], k))
    return pairs


def _session(args, graph) -> RoutingSession:
    if getattr(args, "session", None):
        try:
            return RoutingSession.from_dict(graph, _read_json(args.session, "--session"))
        except HashListMismatch as exc:
            raise UsageError(f"--session: {exc}") from None
    return RoutingSession(graph)


def cmd_route_multi(args):
    graph = _load_net(args)
    raw = _read_pairs(args.pairs)
    pairs = [(_node(graph, s, f"--pairs line {k}"), _node(graph, t, f"--pairs line {k}")) for s, t, k in raw]
    session = _session(args, graph)
    try:
        res = session.route_multi(pairs, algorithm=args.algo)
    except SearchError as exc:
        raise UsageError(f"--pairs: {exc}") from None
    records = [_path_record(o) if isinstance(o, Path) else o.as_dict() for o in res.outcomes]
    _maybe_dot(args, graph, res.routed)
    if args.session_out:
        _write(args.session_out, serialize.dumps(session.to_dict()))
    _emit({"routed": res.success_count, "requested": len(pairs), "outcomes": records})
    if res.success_count < len(pairs):
        raise NothingFound()


def cmd_cycles(args):
    graph = _load_net(args)
    p = _node(graph, args.parent, "--parent")
    mode, weight = _mode(args.mode)
    try:
        if mode == "all":
            found = dfs_cycles(graph, p, dedup=not args.raw)
            cycles = found.cycles
            extra = {"raw_count": found.raw_count}
        elif mode == "fixed":
            c = dfs_fixed_weight_cycle(graph, p, weight)
            cycles, extra = ([c] if c else []), {}
        else:
            c = dfs_shortest_cycle(graph, p)
            cycles, extra = ([c] if c else []), {}
    except SearchError as exc:
        raise _search_usage(exc) from None
    _maybe_dot(args, graph, cycles)
    _emit(dict(count=len(cycles), **extra, cycles=[_path_record(c) for c in cycles]))
    if not cycles:
        raise NothingFound()


def cmd_fabric(args):
    try:
        graph = build_switch_fabric(SwitchFabricSpec(args.n, args.topology))
    except ValueError as exc:
        raise UsageError(f"--n: {exc}") from None
    if args.out:
        serialize.save_graph(graph, args.out)
    out = {"n": args.n, "topology": args.topology, "units": graph.num_units, "stages": graph.meta["stages"],
           "inputs": [format_node_id(n) for n in graph.inputs],
           "outputs": [format_node_id(n) for n in graph.outputs]}
    if args.enumerate:
        perms = sorted(enumerate_fabric_permutations(graph))
        out["realizable"] = len(perms)
        out["permutations"] = [list(p) for p in perms]
    _emit(out)


def cmd_hashlist(args):
    graph = _load_net(args)
    if args.generate:
        ins = [_node(graph, n, "--inputs") for n in args.inputs] if args.inputs else list(graph.inputs)
        outs = [_node(graph, n, "--outputs") for n in args.outputs] if args.outputs else list(graph.outputs)
        if not ins or not outs:
            raise UsageError("--inputs/--outputs: network lists no ports; pass them explicitly")
        try:
            table = build_hash_list(graph, ins, outs)
        except SearchError as exc:
            raise UsageError(str(exc)) from None
        _write(args.table, serialize.dumps(table.to_dict()))
        _emit({"table": args.table, **table.metadata})
        return
    if not (args.source and args.target):
        raise UsageError("--lookup needs --from and --to")
    try:
        table = HashList.from_dict(_read_json(args.table, "--table"), graph)
    except HashListMismatch as exc:
        raise UsageError(f"--table: {exc}") from None
    s = _node(graph, args.source, "--from")
    t = _node(graph, args.target, "--to")
    session = _session(args, graph)
    try:
        res = hash_list_route(table, session, (s, t))
    except KeyError as exc:
        raise UsageError(f"--from/--to: {exc.args[0]}") from None
    if args.session_out:
        _write(args.session_out, serialize.dumps(session.to_dict()))
    if isinstance(res, Unroutable):
        _emit(res.as_dict())
        raise NothingFound()
    _emit({"paths": [_path_record(res)]})


def cmd_fault(args):
    graph = _load_net(args)
    try:
        strategy = parse_fault_strategy(args.strategy)
    except ValueError as exc:
        raise UsageError(f"--strategy: {exc}") from None
    session = _session(args, graph)
    try:
        session.apply_fault(args.unit, strategy)
    except (UnknownNode, NodeIdError) as exc:
        raise UsageError(f"--unit: {exc}") from None
    out = {"unit": str(session.fault_log[-1][0]), "strategy": strategy.label()}
    if args.session_out:
        _write(args.session_out, serialize.dumps(session.to_dict()))
    if args.source or args.target:
        if not (args.source and args.target):
            raise UsageError("--from and --to go together")
        s = _node(graph, args.source, "--from")
        t = _node(graph, args.target, "--to")
        try:
            res = session.find(s, t)
        except SearchError as exc:
            raise _search_usage(exc) from None
        if isinstance(res, Unroutable):
            out.update(res.as_dict())
            _emit(out)
            raise NothingFound()
        out["paths"] = [_path_record(res)]
    _emit(out)


def cmd_bench(args):
    data = _read_json(args.config, "--config")
    try:
        cfg = BenchConfig.from_dict(data)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"--config: {exc}") from None
    try:
        report = run_bench(cfg)
    except BenchError as exc:
        raise UsageError(f"--config: {exc}") from None
    text = emit_table(report, args.format)
    if args.out:
        _write(args.out, text)
    sys.stdout.write(text)
    for name, passed in sorted(report.checks.items()):
        sys.stderr.write(f"check {name}: {'pass' if passed else 'FAIL'}\n")
    if not report.ok:
        raise NothingFound()


def cmd_export(args):
    graph = _load_net(args)
    text = serialize.export_graph(graph, args.format)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="photonroute", description="Routing on MZI waveguide meshes")
    sub = p.add_subparsers(dest="command", required=True)

    def net(sp):
        sp.add_argument("--net", help=f"network file (default: ${NET_ENV})")

    b = sub.add_parser("build", help="build a hexagonal network and write it as JSON")
    b.add_argument("--cells", type=int, default=1)
    b.add_argument("--r-inner", type=float)
    b.add_argument("--tolerance", type=float)
    b.add_argument("--config", help="JSON build config (kind, num_cells, radii, fabric n/topology)")
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_build)

    r = sub.add_parser("route", help="search paths between two ports")
    net(r)
    r.add_argument("--from", dest="source", required=True)
    r.add_argument("--to", dest="target", required=True)
    r.add_argument("--mode", default="shortest", help="shortest | all | fixed:W")
    r.add_argument("--algo", choices=("dfs", "bidir", "dijkstra"), default="dfs")
    r.add_argument("--guided", action="store_true", help="use the unit-distance bound in DFS shortest")
    r.add_argument("--dot", help="write a DOT overlay of the result")
    r.set_defaults(func=cmd_route)

    m = sub.add_parser("route-multi", help="route an ordered list of pairs")
    net(m)
    m.add_argument("--pairs", required=True, help="file with one 'source target' pair per line")
    m.add_argument("--algo", choices=("dfs", "dijkstra", "bidir"), default="dfs")
    m.add_argument("--session", help="session JSON to start from")
    m.add_argument("--session-out", help="write the resulting session JSON")
    m.add_argument("--dot")
    m.set_defaults(func=cmd_route_multi)

    c = sub.add_parser("cycles", help="cycles through a parent port")
    net(c)
    c.add_argument("--parent", required=True)
    c.add_argument("--mode", default="all", help="all | shortest | fixed:W")
    c.add_argument("--raw", action="store_true", help="keep both orientations of each cycle")
    c.add_argument("--dot")
    c.set_defaults(func=cmd_cycles)

    f = sub.add_parser("fabric", help="build an NxN switch fabric")
    f.add_argument("--n", type=int, default=4)
    f.add_argument("--topology", choices=("benes", "crossbar"), default="benes")
    f.add_argument("--enumerate", action="store_true", help="list realizable permutations")
    f.add_argument("--out", help="write the fabric graph as JSON")
    f.set_defaults(func=cmd_fabric)

    h = sub.add_parser("hashlist", help="generate or query a precomputed path table")
    net(h)
    g = h.add_mutually_exclusive_group(required=True)
    g.add_argument("--generate", action="store_true")
    g.add_argument("--lookup", action="store_true")
    h.add_argument("--table", required=True, help="hash list JSON file")
    h.add_argument("--inputs", nargs="*")
    h.add_argument("--outputs", nargs="*")
    h.add_argument("--from", dest="source")
    h.add_argument("--to", dest="target")
    h.add_argument("--session")
    h.add_argument("--session-out")
    h.set_defaults(func=cmd_hashlist)

    fa = sub.add_parser("fault", help="apply a fault strategy to a unit")
    net(fa)
    fa.add_argument("--unit", required=True, help="unit id, e.g. i.2.0")
    fa.add_argument("--strategy", required=True, help="blacklist | remove | inflate:P")
    fa.add_argument("--from", dest="source")
    fa.add_argument("--to", dest="target")
    fa.add_argument("--session")
    fa.add_argument("--session-out")
    fa.set_defaults(func=cmd_fault)

    be = sub.add_parser("bench", help="time the searches and print a comparison table")
    be.add_argument("--config", required=True)
    be.add_argument("--format", choices=("markdown", "csv"), default="markdown")
    be.add_argument("--out")
    be.set_defaults(func=cmd_bench)

    ex = sub.add_parser("export", help="export a network as DOT or JSON")
    net(ex)
    ex.add_argument("--format", choices=("dot", "json"), default="dot")
    ex.add_argument("--out")
    ex.set_defaults(func=cmd_export)
    return p


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except NothingFound:
        return 1
    return 0


def main() -> None:
    sys.exit(run_cli())
