"""Weighted-graph model of MZI meshes.

Each MZI unit is four primary nodes (a, b on the input side, c, d on the
output side) joined as a complete bipartite graph, plus one dummy node per
port.  Dummy edges carry a large negative weight and internal edges a large
positive one, chosen so that a physical traversal of a unit costs exactly 1
while bouncing back through a third primary node of the same unit pushes the
running weight over a fixed threshold.
"""
from __future__ import annotations

import enum
import hashlib
import math
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

PRIMARY_LETTERS = "abcd"
DUMMY_LETTERS = "efgh"
LETTERS = PRIMARY_LETTERS + DUMMY_LETTERS

# dummy node -> the primary node it is attached to
DUMMY_OF = {"e": "a", "f": "b", "g": "c", "h": "d"}
INTERNAL_PAIRS = (("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"))


class Circle(str, enum.Enum):
    INNER = "i"
    OUTER = "o"
    NONE = "n"  # switching-fabric units

    @property
    def rank(self) -> int:
        return _CIRCLE_RANK[self]


_CIRCLE_RANK = {Circle.INNER: 0, Circle.OUTER: 1, Circle.NONE: 2}


class UnitState(enum.Enum):
    UNSET = "unset"
    BAR = "bar"
    CROSS = "cross"


class NodeIdError(ValueError):
    """Raised for malformed node names."""


class UnknownNode(KeyError):
    pass


class GraphConstructionError(ValueError):
    pass


@dataclass(frozen=True)
class NodeId:
    circle: Circle
    letter: str
    unit_index: int
    cell_index: int = 0

    def __post_init__(self):
        if not isinstance(self.circle, Circle):
            object.__setattr__(self, "circle", Circle(self.circle))
        if self.letter not in LETTERS:
            raise NodeIdError(f"letter {self.letter!r} out of range a..h")
        if self.unit_index < 0 or self.cell_index < 0:
            raise NodeIdError(f"negative index in {self.unit_index}, {self.cell_index}")

    @property
    def is_primary(self) -> bool:
        return self.letter in PRIMARY_LETTERS

    @property
    def is_dummy(self) -> bool:
        return self.letter in DUMMY_LETTERS

    @property
    def unit(self) -> "UnitId":
        return UnitId(self.circle, self.unit_index, self.cell_index)

    def sort_key(self):
        return (self.cell_index, self.unit_index, self.circle.rank, self.letter)

    def __lt__(self, other: "NodeId") -> bool:
        return self.sort_key() < other.sort_key()

    def __le__(self, other):
        return self.sort_key() <= other.sort_key()

    def __gt__(self, other):
        return self.sort_key() > other.sort_key()

    def __ge__(self, other):
        return self.sort_key() >= other.sort_key()

    def __str__(self) -> str:
        return format_node_id(self)

    def __repr__(self) -> str:
        return f"NodeId({format_node_id(self)!r})"


@dataclass(frozen=True)
class UnitId:
    circle: Circle
    unit_index: int
    cell_index: int = 0

    def __post_init__(self):
        if not isinstance(self.circle, Circle):
            object.__setattr__(self, "circle", Circle(self.circle))

    def sort_key(self):
        return (self.cell_index, self.unit_index, self.circle.rank)

    def __lt__(self, other: "UnitId") -> bool:
        return self.sort_key() < other.sort_key()

    def node(self, letter: str) -> NodeId:
        return NodeId(self.circle, letter, self.unit_index, self.cell_index)

    def __str__(self) -> str:
        return f"{self.circle.value}.{self.unit_index}.{self.cell_index}"

    def __repr__(self) -> str:
        return f"UnitId({str(self)!r})"


_COMPACT = re.compile(r"^([a-z])([a-z])(\d)(\d)?$")


def parse_node_id(text: str) -> NodeId:
    """Parse 'o.f.3.3' or the compact 'of33' / 'of3' (cell 0) form."""
    if isinstance(text, NodeId):
        return text
    s = str(text).strip()
    if "." in s:
        parts = s.split(".")
        if len(parts) != 4:
            raise NodeIdError(f"{text!r}: expected circle.letter.unit.cell")
        circle, letter, unit, cell = parts
    else:
        m = _COMPACT.match(s)
        if m is None:
            if re.match(r"^[a-z]{2}\d{3,}$", s):
                raise NodeIdError(f"{text!r}: compact form takes single-digit indices, use circle.letter.unit.cell")
            raise NodeIdError(f"{text!r}: not a node name")
        circle, letter, unit, cell = m.group(1), m.group(2), m.group(3), m.group(4) or "0"
    if circle not in ("i", "o", "n"):
        raise NodeIdError(f"{text!r}: circle {circle!r} must be one of i, o, n")
    if letter not in LETTERS:
        raise NodeIdError(f"{text!r}: letter {letter!r} out of range a..h")
    for label, value in (("unit", unit), ("cell", cell)):
        if not value.isdigit():
            raise NodeIdError(f"{text!r}: {label} index {value!r} is not a non-negative integer")
    return NodeId(Circle(circle), letter, int(unit), int(cell))


def format_node_id(node: NodeId) -> str:
    return f"{node.circle.value}.{node.letter}.{node.unit_index}.{node.cell_index}"


def parse_unit_id(text: str) -> UnitId:
    if isinstance(text, UnitId):
        return text
    s = str(text).strip()
    m = re.match(r"^([ion])\.(\d+)\.(\d+)$", s) or re.match(r"^([ion])(\d)(\d)?$", s)
    if m is None:
        raise NodeIdError(f"{text!r}: not a unit name (expected circle.unit.cell)")
    return UnitId(Circle(m.group(1)), int(m.group(2)), int(m.group(3) or 0))


@dataclass(frozen=True)
class WeightScheme:
    w_dummy: int
    w_internal: int
    w_link: int
    threshold: int

    def as_dict(self) -> dict:
        return {"w_dummy": self.w_dummy, "w_internal": self.w_internal,
                "w_link": self.w_link, "threshold": self.threshold}


def derive_weight_scheme(physical: int = 1, reflected: int = 4003) -> WeightScheme:
    """Integer weights with e-a-c-g == physical and e-a-d-b-c-g == reflected.

    2x + y = physical and 2x + 3y = reflected give y = (reflected - physical) / 2.
    The threshold is the weight at the third primary node of a reflected
    traversal, x + 2y, the first prefix no physical walk can reach.
    """
    if (reflected - physical) % 2:
        raise ValueError("no integer solution")
    w_internal = (reflected - physical) // 2
    if (physical - w_internal) % 2:
        raise ValueError("no integer solution")
    w_dummy = (physical - w_internal) // 2
    return WeightScheme(w_dummy, w_internal, 0, w_dummy + 2 * w_internal)


DEFAULT_SCHEME = derive_weight_scheme()


def _rot(v, deg):
    a = math.radians(deg)
    c, s = math.cos(a), math.sin(a)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])


@dataclass
class MZIUnit:
    id: UnitId
    nodes: Dict[str, NodeId]
    position: Tuple[float, float] = (0.0, 0.0)
    orientation: float = 0.0
    length: float = 1.0
    port_offset: Optional[float] = None
    state: UnitState = UnitState.UNSET

    def node_positions(self) -> Dict[str, np.ndarray]:
        """Layout: input end P, output end Q, travel direction u = P->Q."""
        L = self.length
        s = 0.2 * L if self.port_offset is None else self.port_offset
        u = _rot((1.0, 0.0), self.orientation)
        perp = _rot(u, 90)
        c = np.asarray(self.position, dtype=float)
        P, Q = c - 0.5 * L * u, c + 0.5 * L * u
        return {
            "a": P + 0.3 * L * u + 0.1 * L * perp,
            "b": P + 0.3 * L * u - 0.1 * L * perp,
            "c": Q - 0.3 * L * u + 0.1 * L * perp,
            "d": Q - 0.3 * L * u - 0.1 * L * perp,
            "e": P + s * _rot(u, 60),
            "f": P + s * _rot(u, -60),
            "g": Q + s * _rot(-u, -60),
            "h": Q + s * _rot(-u, 60),
        }

    def edges(self, scheme: WeightScheme = DEFAULT_SCHEME) -> List[Tuple[NodeId, NodeId, int]]:
        out = [(self.nodes[d], self.nodes[p], scheme.w_dummy) for d, p in DUMMY_OF.items()]
        out += [(self.nodes[x], self.nodes[y], scheme.w_internal) for x, y in INTERNAL_PAIRS]
        return out

    @property
    def primaries(self) -> Tuple[NodeId, ...]:
        return tuple(self.nodes[x] for x in PRIMARY_LETTERS)


def make_unit(unit_index: int, cell_index: int, circle, position=(0.0, 0.0), orientation: float = 0.0,
              *, length: float = 1.0, port_offset: Optional[float] = None) -> MZIUnit:
    uid = UnitId(Circle(circle), unit_index, cell_index)
    return MZIUnit(uid, {x: uid.node(x) for x in LETTERS}, tuple(map(float, position)),
                   float(orientation), float(length), port_offset)


class MeshGraph:
    """Immutable undirected weighted graph over NodeIds.

    Nodes are stored in canonical order and addressed internally by index;
    the search code works on the integer adjacency tuples directly.
    """

    def __init__(self, nodes: Sequence[NodeId], positions, edges: Iterable[Tuple[NodeId, NodeId, int]],
                 units: Mapping[UnitId, MZIUnit], *, scheme: WeightScheme = DEFAULT_SCHEME,
                 aliases: Optional[Mapping[NodeId, NodeId]] = None,
                 unit_aliases: Optional[Mapping[UnitId, UnitId]] = None,
                 inputs: Sequence[NodeId] = (), outputs: Sequence[NodeId] = (),
                 meta: Optional[dict] = None, threshold: Optional[int] = -1):
        order = sorted(range(len(nodes)), key=lambda i: nodes[i].sort_key())
        self.nodes: Tuple[NodeId, ...] = tuple(nodes[i] for i in order)
        self.index: Dict[NodeId, int] = {n: i for i, n in enumerate(self.nodes)}
        if len(self.index) != len(self.nodes):
            raise GraphConstructionError("duplicate node ids")
        pos = np.asarray(positions, dtype=float).reshape(-1, 2)
        self.positions = pos[order] if len(order) else pos
        self.positions.setflags(write=False)
        self.scheme = scheme
        # threshold=None switches the searches to structural pruning
        self.threshold = scheme.threshold if threshold == -1 else threshold
        adj: List[Dict[int, int]] = [dict() for _ in self.nodes]
        for u, v, w in edges:
            i, j = self.index[u], self.index[v]
            if i == j:
                raise GraphConstructionError(f"self loop at {u}")
            if j in adj[i] and adj[i][j] != w:
                raise GraphConstructionError(f"conflicting weights on {u}-{v}")
            adj[i][j] = w
            adj[j][i] = w
        self.adj: Tuple[Tuple[Tuple[int, int], ...], ...] = tuple(tuple(sorted(a.items())) for a in adj)
        self.units: Dict[UnitId, MZIUnit] = {k: units[k] for k in sorted(units)}
        self.unit_ids: Tuple[UnitId, ...] = tuple(self.units)
        unit_pos = {u: k for k, u in enumerate(self.unit_ids)}
        owner: Dict[NodeId, set] = {}
        unit_of = [-1] * len(self.nodes)
        for uid, unit in self.units.items():
            for letter, n in unit.nodes.items():
                owner.setdefault(n, set()).add(uid)
                if letter in PRIMARY_LETTERS:
                    i = self.index[n]
                    if unit_of[i] != -1:
                        raise GraphConstructionError(f"primary node {n} belongs to two units")
                    unit_of[i] = unit_pos[uid]
        self.node_owner: Dict[NodeId, FrozenSet[UnitId]] = {n: frozenset(owner.get(n, ())) for n in self.nodes}
        self.unit_of: Tuple[int, ...] = tuple(unit_of)
        self.primary: Tuple[bool, ...] = tuple(n.is_primary for n in self.nodes)
        # cheapest internal edge leaving each primary node, used by the search bounds
        self.min_internal: Tuple[int, ...] = tuple(
            min((w for j, w in self.adj[i] if self.primary[j]), default=0) if self.primary[i] else 0
            for i in range(len(self.nodes)))
        # the dummy node hanging off each primary (-1 for dummies)
        self.port_of: Tuple[int, ...] = tuple(
            next((j for j, _ in self.adj[i] if not self.primary[j]), -1) if self.primary[i] else -1
            for i in range(len(self.nodes)))
        self._unit_distance: Dict[int, Tuple[int, ...]] = {}
        self._bound_cache: dict = {}
        self.aliases: Dict[NodeId, NodeId] = dict(sorted((aliases or {}).items(), key=lambda kv: kv[0].sort_key()))
        self.unit_aliases: Dict[UnitId, UnitId] = dict(sorted((unit_aliases or {}).items(), key=lambda kv: kv[0].sort_key()))
        self.inputs: Tuple[NodeId, ...] = tuple(inputs)
        self.outputs: Tuple[NodeId, ...] = tuple(outputs)
        self.meta = dict(meta or {})
        self._fingerprint = None

    def unit_distance(self, target: int) -> Tuple[int, ...]:
        """Fewest unit crossings from each dummy node to dummy `target`.

        A relaxation that ignores physicality and engagement, so it never
        overestimates; the searches use it as a pruning bound.  Entries for
        primary nodes and unreachable dummies are a large sentinel.
        """
        cached = self._unit_distance.get(target)
        if cached is not None:
            return cached
        big = 1 << 40
        dist = [big] * len(self.nodes)
        dist[target] = 0
        queue = deque([target])
        while queue:
            x = queue.popleft()
            d = dist[x]
            for p, _ in self.adj[x]:
                if not self.primary[p]:
                    # a link edge between two dummies costs no unit
                    if d < dist[p]:
                        dist[p] = d
                        queue.appendleft(p)
                    continue
                for q, _ in self.adj[p]:
                    if self.primary[q]:
                        y = self.port_of[q]
                        if y >= 0 and d + 1 < dist[y]:
                            dist[y] = d + 1
                            queue.append(y)
        out = tuple(dist)
        self._unit_distance[target] = out
        return out

    # lookups -----------------------------------------------------------
    def __len__(self):
        return len(self.nodes)

    def __contains__(self, node) -> bool:
        try:
            self.resolve(node)
        except (UnknownNode, NodeIdError):
            return False
        return True

    def resolve(self, node) -> NodeId:
        """Map a NodeId or name (including merged-away names) to a graph node."""
        n = parse_node_id(node) if not isinstance(node, NodeId) else node
        if n in self.index:
            return n
        if n in self.aliases:
            return self.aliases[n]
        raise UnknownNode(f"unknown node {format_node_id(n)}")

    def resolve_unit(self, unit) -> UnitId:
        u = parse_unit_id(unit) if not isinstance(unit, UnitId) else unit
        if u in self.units:
            return u
        if u in self.unit_aliases:
            return self.unit_aliases[u]
        raise UnknownNode(f"unknown unit {u}")

    def neighbors(self, node) -> List[Tuple[NodeId, int]]:
        i = self.index[self.resolve(node)]
        return [(self.nodes[j], w) for j, w in self.adj[i]]

    def weight(self, u, v) -> int:
        i, j = self.index[self.resolve(u)], self.index[self.resolve(v)]
        for k, w in self.adj[i]:
            if k == j:
                return w
        raise KeyError(f"no edge {u}-{v}")

    def has_edge(self, u, v) -> bool:
        try:
            self.weight(u, v)
        except KeyError:
            return False
        return True

    def degree(self, node) -> int:
        return len(self.adj[self.index[self.resolve(node)]])

    def edges(self) -> Iterator[Tuple[NodeId, NodeId, int]]:
        for i, nbrs in enumerate(self.adj):
            for j, w in nbrs:
                if i < j:
                    yield self.nodes[i], self.nodes[j], w

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    @property
    def num_units(self) -> int:
        return len(self.units)

    def position(self, node) -> np.ndarray:
        return self.positions[self.index[self.resolve(node)]]

    def ports(self) -> List[NodeId]:
        """Dummy nodes with a single neighbour: the open I/O ports."""
        return [n for i, n in enumerate(self.nodes) if not self.primary[i] and len(self.adj[i]) == 1]

    def dummies(self) -> List[NodeId]:
        return [n for i, n in enumerate(self.nodes) if not self.primary[i]]

    def unit_nodes(self, unit) -> FrozenSet[NodeId]:
        return frozenset(self.units[self.resolve_unit(unit)].nodes.values())

    def fingerprint(self) -> str:
        if self._fingerprint is None:
            h = hashlib.sha256()
            h.update(repr(self.scheme.as_dict()).encode())
            h.update(repr(self.threshold).encode())
            for n in self.nodes:
                h.update(format_node_id(n).encode() + b";")
            for u, v, w in self.edges():
                h.update(f"{format_node_id(u)}-{format_node_id(v)}:{w};".encode())
            self._fingerprint = h.hexdigest()[:16]
        return self._fingerprint

    def __repr__(self):
        return f"MeshGraph(nodes={len(self.nodes)}, edges={self.num_edges}, units={self.num_units})"


class GraphBuilder:
    """Collects units, merges coincident nodes, and freezes a MeshGraph.

    Nodes closer than `tolerance` are merged when both are dummy nodes, or
    when all four primaries of one unit land on another unit's primaries (a
    unit drawn twice by neighbouring cells).  Any other coincidence, or two
    distinct nodes closer than `clearance`, is a construction error.  The
    survivor of a merge is the node with the smallest (cell, unit, circle).
    """

    def __init__(self, scheme: WeightScheme = DEFAULT_SCHEME, tolerance: float = 1e-6,
                 clearance: Optional[float] = None):
        self.scheme = scheme
        self.tolerance = tolerance
        self.clearance = clearance
        self.units: Dict[UnitId, MZIUnit] = {}
        self._identify: List[Tuple[NodeId, NodeId]] = []
        self._links: List[Tuple[NodeId, NodeId]] = []

    def add_unit(self, unit: MZIUnit) -> MZIUnit:
        if unit.id in self.units:
            raise GraphConstructionError(f"duplicate unit id {unit.id}")
        self.units[unit.id] = unit
        return unit

    def identify(self, a: NodeId, b: NodeId):
        """Merge two dummy nodes regardless of their positions."""
        self._identify.append((a, b))

    def link(self, a: NodeId, b: NodeId):
        """Join two dummy nodes by a waveguide edge of weight w_link."""
        self._links.append((a, b))

    def build(self, *, inputs=(), outputs=(), meta=None, geometric: bool = True) -> MeshGraph:
        names: List[NodeId] = []
        pts: List[np.ndarray] = []
        for unit in self.units.values():
            where = unit.node_positions()
            for letter in LETTERS:
                names.append(unit.nodes[letter])
                pts.append(where[letter])
        xy = np.array(pts).reshape(-1, 2)
        where_of = {n: k for k, n in enumerate(names)}
        parent = list(range(len(names)))

        def find(k):
            while parent[k] != k:
                parent[k] = parent[parent[k]]
                k = parent[k]
            return k

        def union(p, q):
            rp, rq = find(p), find(q)
            if rp != rq:
                parent[max(rp, rq)] = min(rp, rq)

        pairs = set()
        if geometric and len(names) > 1:
            tree = cKDTree(xy)
            pairs = tree.query_pairs(self.tolerance)
            if self.clearance and self.clearance > self.tolerance:
                close = tree.query_pairs(self.clearance) - pairs
                if close:
                    bad = sorted((format_node_id(names[p]), format_node_id(names[q])) for p, q in close)
                    raise GraphConstructionError(f"nodes closer than clearance {self.clearance}: {bad[:10]}")
        primary_pairs = []
        for p, q in sorted(pairs):
            a, b = names[p], names[q]
            if a.unit == b.unit:
                raise GraphConstructionError(f"coincident nodes within one unit: {a}, {b}")
            if a.is_dummy and b.is_dummy:
                union(p, q)
            elif a.is_primary and b.is_primary:
                primary_pairs.append((a, b))
            else:
                raise GraphConstructionError(f"dummy and primary node coincide: {a}, {b}")
        for a, b in self._identify:
            if not (a.is_dummy and b.is_dummy):
                raise GraphConstructionError(f"only dummy nodes can be identified: {a}, {b}")
            union(where_of[a], where_of[b])

        # primaries may only coincide as whole duplicated units
        dropped: Dict[UnitId, UnitId] = {}
        if primary_pairs:
            partner: Dict[UnitId, Dict[UnitId, int]] = {}
            for a, b in primary_pairs:
                partner.setdefault(a.unit, {}).setdefault(b.unit, 0)
                partner[a.unit][b.unit] += 1
                partner.setdefault(b.unit, {}).setdefault(a.unit, 0)
                partner[b.unit][a.unit] += 1
            for u, others in partner.items():
                if any(c != 4 for c in others.values()):
                    raise GraphConstructionError(f"unit {u} partially overlaps {sorted(map(str, others))}")
            for a, b in primary_pairs:
                union(where_of[a], where_of[b])
            for u, others in partner.items():
                v = min(others)
                if v < u:
                    dropped[u] = v
            # a chain of duplicates collapses onto the smallest unit
            for u in list(dropped):
                v = dropped[u]
                while v in dropped:
                    v = dropped[v]
                dropped[u] = v

        groups: Dict[int, List[int]] = {}
        for k in range(len(names)):
            groups.setdefault(find(k), []).append(k)
        survivor_of: Dict[NodeId, NodeId] = {}
        keep_nodes, keep_pos = [], []
        for members in groups.values():
            best = min(members, key=lambda k: names[k].sort_key())
            s = names[best]
            keep_nodes.append(s)
            keep_pos.append(xy[best])
            for k in members:
                survivor_of[names[k]] = s
        aliases = {n: s for n, s in survivor_of.items() if n != s}

        units: Dict[UnitId, MZIUnit] = {}
        edges = []
        for uid, unit in self.units.items():
            if uid in dropped:
                continue
            mapped = MZIUnit(uid, {x: survivor_of[n] for x, n in unit.nodes.items()}, unit.position,
                             unit.orientation, unit.length, unit.port_offset)
            units[uid] = mapped
            edges.extend(mapped.edges(self.scheme))
        for a, b in self._links:
            edges.append((survivor_of[a], survivor_of[b], self.scheme.w_link))
        inputs = [survivor_of.get(n, n) for n in inputs]
        outputs = [survivor_of.get(n, n) for n in outputs]
        return MeshGraph(keep_nodes, keep_pos, edges, units, scheme=self.scheme, aliases=aliases,
                         unit_aliases=dropped, inputs=inputs, outputs=outputs, meta=meta)


# paths ------------------------------------------------------------------

def _internal_state(x: NodeId, y: NodeId) -> UnitState:
    # a<->c and b<->d are Cross, a<->d and b<->c are Bar
    pair = {x.letter, y.letter}
    return UnitState.CROSS if pair in ({"a", "c"}, {"b", "d"}) else UnitState.BAR


def _closed(seq: Sequence[NodeId]) -> bool:
    return len(seq) > 3 and seq[0] == seq[-1]


def _hops(seq: Sequence[NodeId]):
    """Consecutive pairs; for a closed sequence the wrap-around triple is covered by _triples."""
    return zip(seq, seq[1:])


def _triples(seq: Sequence[NodeId]):
    if _closed(seq):
        ring = list(seq[:-1])
        ring = ring + ring[:2]
        return zip(ring, ring[1:], ring[2:])
    return zip(seq, seq[1:], seq[2:])


def is_physical(nodes: Sequence[NodeId], *, single_pass: bool = False) -> bool:
    """Structural physicality test, independent of edge weights.

    A sequence is physical when no node repeats (a closed cycle may repeat
    its first node at the end), it never steps through three primary nodes
    in a row (a back-reflection inside one unit), and every unit it crosses
    is left in one consistent Bar/Cross state.  A unit may be crossed twice
    through its two disjoint internal edges.  With single_pass=True each
    unit may be visited at most once (at most two of its primaries).
    """
    seq = list(nodes)
    if not seq:
        return False
    body = seq[:-1] if _closed(seq) else seq
    if len(set(body)) != len(body):
        return False
    for x, y, z in _triples(seq):
        if x.is_primary and y.is_primary and z.is_primary:
            return False
    states: Dict[UnitId, UnitState] = {}
    seen: Dict[UnitId, int] = {}
    for x, y in _hops(seq):
        if x.is_primary and y.is_primary:
            if x.unit != y.unit:
                return False
            s = _internal_state(x, y)
            if states.setdefault(x.unit, s) != s:
                return False
    if single_pass:
        for n in body:
            if n.is_primary:
                seen[n.unit] = seen.get(n.unit, 0) + 1
                if seen[n.unit] > 2:
                    return False
    return True


def path_weight(graph: MeshGraph, nodes: Sequence) -> int:
    seq = [graph.resolve(n) for n in nodes]
    total = 0
    for x, y in zip(seq, seq[1:]):
        try:
            total += graph.weight(x, y)
        except KeyError:
            raise ValueError(f"gap in path: {x} and {y} are not adjacent") from None
    return total


def _unit_of_hop(graph: Optional[MeshGraph], x: NodeId, y: NodeId) -> UnitId:
    if graph is not None:
        return graph.unit_ids[graph.unit_of[graph.index[x]]]
    return x.unit


def implied_states(nodes: Sequence[NodeId], graph: Optional[MeshGraph] = None) -> Dict[UnitId, UnitState]:
    out: Dict[UnitId, UnitState] = {}
    for x, y in _hops(nodes):
        if x.is_primary and y.is_primary:
            out.setdefault(_unit_of_hop(graph, x, y), _internal_state(x, y))
    return dict(sorted(out.items()))


def internal_hops(nodes: Sequence[NodeId]) -> int:
    return sum(1 for x, y in _hops(nodes) if x.is_primary and y.is_primary)


@dataclass(frozen=True)
class Path:
    nodes: Tuple[NodeId, ...]
    total_weight: int
    units_traversed: int
    states_implied: Mapping[UnitId, UnitState] = field(default_factory=dict, compare=False)

    @classmethod
    def from_nodes(cls, graph: MeshGraph, nodes: Sequence) -> "Path":
        seq = tuple(graph.resolve(n) for n in nodes)
        return cls(seq, path_weight(graph, seq), internal_hops(seq), implied_states(seq, graph))

    @property
    def source(self) -> NodeId:
        return self.nodes[0]

    @property
    def target(self) -> NodeId:
        return self.nodes[-1]

    @property
    def units(self) -> Tuple[UnitId, ...]:
        return tuple(self.states_implied)

    def __len__(self):
        return len(self.nodes)

    def as_dict(self) -> dict:
        return {
            "nodes": [format_node_id(n) for n in self.nodes],
            "total_weight": self.total_weight,
            "units_traversed": self.units_traversed,
            "states": {str(u): s.value for u, s in self.states_implied.items()},
        }


def cycle_key(nodes: Sequence[NodeId]) -> Tuple[NodeId, ...]:
    """Rotation- and orientation-invariant form of a closed node sequence."""
    ring = list(nodes[:-1]) if _closed(nodes) else list(nodes)
    k = min(range(len(ring)), key=lambda i: ring[i].sort_key())
    fwd = ring[k:] + ring[:k]
    bwd = [fwd[0]] + fwd[1:][::-1]
    return tuple(min(fwd, bwd, key=lambda s: [n.sort_key() for n in s]))


@dataclass(frozen=True)
class Cycle(Path):
    @property
    def parent(self) -> NodeId:
        return self.nodes[0]

    @property
    def canonical_key(self) -> Tuple[NodeId, ...]:
        return cycle_key(self.nodes)

    @classmethod
    def from_nodes(cls, graph: MeshGraph, nodes: Sequence) -> "Cycle":
        p = Path.from_nodes(graph, nodes)
        if not _closed(p.nodes):
            raise ValueError("a cycle must start and end at the same node")
        return cls(p.nodes, p.total_weight, p.units_traversed, p.states_implied)


def unit_state_of(path, unit) -> UnitState:
    """Bar/Cross state a path implies for `unit` (a UnitId or MZIUnit)."""
    nodes = path.nodes if isinstance(path, Path) else tuple(path)
    members = set(unit.primaries) if isinstance(unit, MZIUnit) else None
    uid = unit.id if isinstance(unit, MZIUnit) else unit
    for x, y in _hops(nodes):
        if not (x.is_primary and y.is_primary):
            continue
        if (members is not None and x in members and y in members) or (members is None and x.unit == uid):
            return _internal_state(x, y)
    raise ValueError(f"path does not traverse unit {uid}")
