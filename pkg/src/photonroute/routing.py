"""Stateful routing: node engagement, multi-pair requests, faults, hash lists."""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

from .mesh import (MeshGraph, NodeId, Path, UnitId, format_node_id, parse_node_id, parse_unit_id)
from .search import (SearchError, bidirectional_shortest, dfs_all_paths, dfs_shortest_path,
                     dijkstra_baseline, NonphysicalIntersection)


class EngagementConflict(ValueError):
    pass


class HashListMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Unroutable:
    source: NodeId
    target: NodeId
    reason: str = "no physical path"

    def as_dict(self) -> dict:
        return {"source": format_node_id(self.source), "target": format_node_id(self.target),
                "unroutable": self.reason}


# fault strategies -----------------------------------------------------------

@dataclass(frozen=True)
class FaultStrategy:
    def label(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class InflateWeights(FaultStrategy):
    penalty: int = 10000

    def __post_init__(self):
        if int(self.penalty) < 1:
            raise ValueError("penalty must be >= 1")

    def label(self) -> str:
        return f"inflate:{self.penalty}"


@dataclass(frozen=True)
class RemoveUnit(FaultStrategy):
    def label(self) -> str:
        return "remove"


@dataclass(frozen=True)
class Blacklist(FaultStrategy):
    def label(self) -> str:
        return "blacklist"


def parse_fault_strategy(text: str) -> FaultStrategy:
    t = text.strip().lower()
    if t == "blacklist":
        return Blacklist()
    if t == "remove":
        return RemoveUnit()
    if t.startswith("inflate"):
        _, _, value = t.partition(":")
        try:
            return InflateWeights(int(value) if value else 10000)
        except ValueError:
            raise ValueError(f"bad inflate penalty {value!r}") from None
    raise ValueError(f"unknown fault strategy {text!r}")


def _derive_view(graph: MeshGraph, unit: UnitId, strategy: FaultStrategy) -> MeshGraph:
    """A new graph with the unit removed or its internal edges made heavier."""
    members = graph.units[unit]
    if isinstance(strategy, RemoveUnit):
        gone = set(members.primaries)
        gone |= {n for n in members.nodes.values() if graph.node_owner[n] == frozenset({unit})}
        keep = [n for n in graph.nodes if n not in gone]
        pos = [graph.positions[graph.index[n]] for n in keep]
        edges = [(u, v, w) for u, v, w in graph.edges() if u not in gone and v not in gone]
        units = {k: v for k, v in graph.units.items() if k != unit}
        threshold = graph.threshold
    else:
        prim = set(members.primaries)
        keep = list(graph.nodes)
        pos = graph.positions
        edges = [(u, v, w + strategy.penalty if u in prim and v in prim else w) for u, v, w in graph.edges()]
        units = dict(graph.units)
        threshold = None
    kept = set(keep)
    aliases = {k: v for k, v in graph.aliases.items() if v in kept}
    meta = dict(graph.meta)
    meta["faults"] = list(meta.get("faults", [])) + [f"{unit}:{strategy.label()}"]
    return MeshGraph(keep, pos, edges, units, scheme=graph.scheme, aliases=aliases,
                     unit_aliases=graph.unit_aliases, inputs=[n for n in graph.inputs if n in kept],
                     outputs=[n for n in graph.outputs if n in kept], meta=meta, threshold=threshold)


# sessions -------------------------------------------------------------------

Outcome = Union[Path, Unroutable]


@dataclass
class MultiRouteResult:
    outcomes: List[Outcome]
    order_used: List[Tuple[NodeId, NodeId]]
    request_ids: List[Optional[str]]
    elapsed: float = 0.0

    @property
    def routed(self) -> List[Path]:
        return [o for o in self.outcomes if isinstance(o, Path)]

    @property
    def success_count(self) -> int:
        return len(self.routed)

    def __len__(self):
        return len(self.outcomes)


_SEARCHERS = {"dfs": dfs_shortest_path, "dijkstra": dijkstra_baseline}


class RoutingSession:
    """Engagement state on top of an immutable graph.

    Nodes of every allocated path are engaged and excluded from later
    searches.  Faults either blacklist a unit's nodes for this session or
    swap in a derived graph view.
    """

    def __init__(self, graph: MeshGraph):
        self.base_graph = graph
        self.graph = graph
        self.engaged_nodes: Set[NodeId] = set()
        self.blacklisted_nodes: Set[NodeId] = set()
        self.allocated: Dict[str, Path] = {}
        self.fault_log: List[Tuple[UnitId, FaultStrategy]] = []
        self._counter = 0

    # engagement ---------------------------------------------------------
    @property
    def visited(self) -> Set[NodeId]:
        return self.engaged_nodes | self.blacklisted_nodes

    def _new_id(self) -> str:
        self._counter += 1
        return f"r{self._counter}"

    def engage(self, path: Path, request_id: Optional[str] = None) -> str:
        clash = sorted(set(path.nodes) & self.engaged_nodes)
        if clash:
            raise EngagementConflict("path overlaps engaged nodes: " + ", ".join(map(format_node_id, clash)))
        banned = sorted(set(path.nodes) & self.blacklisted_nodes)
        if banned:
            raise EngagementConflict("path uses blacklisted nodes: " + ", ".join(map(format_node_id, banned)))
        rid = request_id or self._new_id()
        if rid in self.allocated:
            raise EngagementConflict(f"request id {rid!r} already allocated")
        self.allocated[rid] = path
        self.engaged_nodes.update(path.nodes)
        return rid

    def release(self, request_id: str) -> Path:
        if request_id not in self.allocated:
            raise KeyError(f"unknown request id {request_id!r}")
        path = self.allocated.pop(request_id)
        self.engaged_nodes.difference_update(path.nodes)
        return path

    # routing ------------------------------------------------------------
    def _endpoint_problem(self, s: NodeId, t: NodeId) -> Optional[str]:
        for n, role in ((s, "source"), (t, "target")):
            if n in self.engaged_nodes:
                return f"{role} {n} engaged by an earlier allocation"
            if n in self.blacklisted_nodes:
                return f"{role} {n} is blacklisted"
        return None

    def find(self, source, target, algorithm: str = "dfs") -> Outcome:
        """Search without engaging anything."""
        try:
            s, t = self.graph.resolve(source), self.graph.resolve(target)
        except KeyError as exc:
            return Unroutable(parse_node_id(source), parse_node_id(target), f"endpoint missing: {exc.args[0]}")
        problem = self._endpoint_problem(s, t)
        if problem:
            return Unroutable(s, t, problem)
        if algorithm == "bidir":
            res = bidirectional_shortest(self.graph, s, t, self.visited)
            if isinstance(res, NonphysicalIntersection):
                return Unroutable(s, t, f"nonphysical intersection at {res.node}")
        else:
            res = _SEARCHERS[algorithm](self.graph, s, t, self.visited)
        return res if res is not None else Unroutable(s, t)

    def route(self, source, target, algorithm: str = "dfs", request_id: Optional[str] = None) -> Outcome:
        res = self.find(source, target, algorithm)
        if isinstance(res, Path):
            self.engage(res, request_id)
        return res

    def route_multi(self, pairs: Iterable[Tuple[object, object]], algorithm: str = "dfs") -> MultiRouteResult:
        """Route pairs one after another; each success blocks its nodes for the rest."""
        t0 = time.perf_counter()
        outcomes, order, ids = [], [], []
        for source, target in pairs:
            res = self.route(source, target, algorithm)
            outcomes.append(res)
            order.append((res.nodes[0], res.nodes[-1]) if isinstance(res, Path) else (res.source, res.target))
            ids.append(self._last_id() if isinstance(res, Path) else None)
        return MultiRouteResult(outcomes, order, ids, time.perf_counter() - t0)

    def _last_id(self) -> str:
        return next(reversed(self.allocated))

    # faults -------------------------------------------------------------
    def apply_fault(self, unit, strategy: FaultStrategy) -> "RoutingSession":
        uid = self.graph.resolve_unit(unit)
        if isinstance(strategy, Blacklist):
            self.blacklisted_nodes.update(self.graph.units[uid].nodes.values())
        else:
            self.graph = _derive_view(self.graph, uid, strategy)
        self.fault_log.append((uid, strategy))
        return self

    # persistence --------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "graph": self.base_graph.fingerprint(),
            "faults": [{"unit": str(u), "strategy": s.label()} for u, s in self.fault_log],
            "allocated": {rid: p.as_dict() for rid, p in self.allocated.items()},
            "engaged": sorted(format_node_id(n) for n in self.engaged_nodes),
            "blacklisted": sorted(format_node_id(n) for n in self.blacklisted_nodes),
            "counter": self._counter,
        }

    @classmethod
    def from_dict(cls, graph: MeshGraph, data: dict) -> "RoutingSession":
        if data.get("graph") != graph.fingerprint():
            raise HashListMismatch("session was saved against a different graph")
        s = cls(graph)
        for f in data.get("faults", []):
            s.apply_fault(parse_unit_id(f["unit"]), parse_fault_strategy(f["strategy"]))
        for rid, p in data.get("allocated", {}).items():
            s.engage(Path.from_nodes(s.graph, p["nodes"]), rid)
        s._counter = int(data.get("counter", len(s.allocated)))
        return s


# hash lists -----------------------------------------------------------------

@dataclass
class HashList:
    table: Dict[Tuple[NodeId, NodeId], List[Path]]
    fingerprint: str
    metadata: dict = field(default_factory=dict)

    def lookup(self, source, target) -> List[Path]:
        key = (parse_node_id(source), parse_node_id(target))
        if key not in self.table:
            raise KeyError(f"pair {format_node_id(key[0])} -> {format_node_id(key[1])} not in hash list")
        return self.table[key]

    def __len__(self):
        return len(self.table)

    def to_dict(self) -> dict:
        return {
            "graph": self.fingerprint,
            "metadata": self.metadata,
            "table": [{"source": format_node_id(s), "target": format_node_id(t),
                       "paths": [p.as_dict() for p in paths]}
                      for (s, t), paths in self.table.items()],
        }

    @classmethod
    def from_dict(cls, data: dict, graph: MeshGraph) -> "HashList":
        if data.get("graph") != graph.fingerprint():
            raise HashListMismatch("hash list was generated for a different graph")
        table = {}
        for row in data["table"]:
            key = (parse_node_id(row["source"]), parse_node_id(row["target"]))
            table[key] = [Path.from_nodes(graph, p["nodes"]) for p in row["paths"]]
        return cls(table, data["graph"], dict(data.get("metadata", {})))


def build_hash_list(graph: MeshGraph, inputs: Sequence, outputs: Sequence) -> HashList:
    """All physical paths for every (input, output) pair, minimum weight first."""
    table: Dict[Tuple[NodeId, NodeId], List[Path]] = {}
    ins = [graph.resolve(n) for n in inputs]
    outs = [graph.resolve(n) for n in outputs]
    for s in ins:
        for t in outs:
            if s == t:
                continue
            table[(s, t)] = dfs_all_paths(graph, s, t).paths
    meta = {"inputs": len(ins), "outputs": len(outs), "pairs": len(table),
            "paths": sum(len(v) for v in table.values())}
    return HashList(table, graph.fingerprint(), meta)


def hash_list_route(hash_list: HashList, session: RoutingSession, pair) -> Outcome:
    """First stored path avoiding engaged and blacklisted nodes; engages it."""
    if hash_list.fingerprint != session.graph.fingerprint():
        raise HashListMismatch("hash list does not belong to the session graph")
    paths = hash_list.lookup(*pair)
    s, t = parse_node_id(pair[0]), parse_node_id(pair[1])
    problem = session._endpoint_problem(s, t)
    if problem:
        return Unroutable(s, t, problem)
    blocked = session.visited
    for p in paths:
        if blocked.isdisjoint(p.nodes):
            session.engage(p)
            return p
    return Unroutable(s, t, "every stored path is blocked")


# switch fabrics -------------------------------------------------------------

def _route_permutation(graph: MeshGraph, pairs: List[Tuple[NodeId, NodeId]],
                       table: Dict[Tuple[NodeId, NodeId], List[Path]]) -> Optional[List[Path]]:
    """Greedy sequential routing over rotated pair orders, then exact backtracking.

    The greedy pass settles almost every permutation; the backtracking over
    stored paths only runs when each rotation strands some pair.
    """
    n = len(pairs)
    for shift in range(n):
        order = [(k + shift) % n for k in range(n)]
        session = RoutingSession(graph)
        res = session.route_multi([pairs[k] for k in order])
        if res.success_count == n:
            paths: List[Optional[Path]] = [None] * n
            for k, p in zip(order, res.outcomes):
                paths[k] = p
            return paths
    for pair in pairs:
        if pair not in table:
            table[pair] = dfs_all_paths(graph, *pair).paths
    chosen: List[Path] = []

    def place(k: int, used: Set[NodeId]) -> bool:
        if k == n:
            return True
        for p in table[pairs[k]]:
            if used.isdisjoint(p.nodes):
                chosen.append(p)
                if place(k + 1, used | set(p.nodes)):
                    return True
                chosen.pop()
        return False

    return list(chosen) if place(0, set()) else None


def enumerate_fabric_permutations(graph: MeshGraph, *, with_paths: bool = False):
    """Input->output permutations the fabric can realise with disjoint physical paths.

    A permutation is a tuple p with input i connected to output p[i].
    """
    n = len(graph.inputs)
    if n == 0 or n != len(graph.outputs):
        raise ValueError("graph has no matching input/output port lists")
    found = {}
    table: Dict[Tuple[NodeId, NodeId], List[Path]] = {}
    for perm in itertools.permutations(range(n)):
        pairs = [(graph.inputs[i], graph.outputs[perm[i]]) for i in range(n)]
        paths = _route_permutation(graph, pairs, table)
        if paths is not None:
            found[perm] = paths
    return found if with_paths else set(found)
