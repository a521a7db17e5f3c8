"""Path and cycle searches with weight-threshold pruning.

All searches run on the integer adjacency of a MeshGraph.  A branch is
continued only while its running weight stays below the graph threshold,
which is what removes back-reflections inside a unit.  Graph views with
inflated weights carry threshold=None, and the searches then refuse the
third primary node in a row directly.

Neighbours are expanded in canonical node order, so every result, including
ties, is reproducible.
"""
from __future__ import annotations

import heapq
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from .mesh import Cycle, MeshGraph, NodeId, Path, UnitState, implied_states, is_physical

BIG = 1 << 62
# bounds at or above this come from the unreachable sentinel of unit_distance
UNREACHABLE = 1 << 39


class SearchError(ValueError):
    pass


@dataclass
class SearchStats:
    nodes_expanded: int = 0
    elapsed: float = 0.0


@dataclass
class PathSet:
    paths: List[Path]
    search_stats: SearchStats = field(default_factory=SearchStats)

    def __len__(self):
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)

    def __getitem__(self, k):
        return self.paths[k]

    @property
    def weights(self) -> List[int]:
        return [p.total_weight for p in self.paths]


@dataclass(frozen=True)
class NonphysicalIntersection:
    """Bidirectional search met at `node` but the joined path is not physical."""
    node: NodeId
    nodes: Tuple[NodeId, ...]
    total_weight: int


def _sort_key(p: Path):
    return (p.total_weight, [n.sort_key() for n in p.nodes])


def _endpoint(graph: MeshGraph, node, role: str) -> int:
    n = graph.resolve(node)
    i = graph.index[n]
    if graph.primary[i]:
        raise SearchError(f"{role} {n} is a primary node; searches start and end at dummy (port) nodes")
    return i


def _blocked(graph: MeshGraph, initial_visited: Optional[Iterable]) -> bytearray:
    mark = bytearray(len(graph.nodes))
    index = graph.index
    for n in initial_visited or ():
        i = index.get(n)
        if i is None:
            try:
                i = index[graph.resolve(n)]
            except KeyError:
                continue  # not part of this graph view
        mark[i] = 1
    return mark


def _prepare(graph, source, target, initial_visited):
    s = _endpoint(graph, source, "source")
    t = _endpoint(graph, target, "target")
    if s == t:
        raise SearchError("source equals target; use the cycle searches for closed paths")
    mark = _blocked(graph, initial_visited)
    if mark[s] or mark[t]:
        raise SearchError("source or target is in the visited set")
    return s, t, mark


def _make_path(graph: MeshGraph, idx: Sequence[int], weight: int, cls=Path) -> Path:
    nodes = tuple(graph.nodes[i] for i in idx)
    hops = sum(1 for a, b in zip(idx, idx[1:]) if graph.primary[a] and graph.primary[b])
    return cls(nodes, weight, hops, implied_states(nodes, graph))


def _walk(graph: MeshGraph, start: int, mark: bytearray, stats: SearchStats, close: Optional[int] = None,
          bound=None) -> Iterator[Tuple[List[int], int, int]]:
    """Depth-first enumeration of physical simple walks from `start`.

    Yields (path, last_index, weight) each time a neighbour equal to `close`
    is reached (the path list is the prefix, not including that node).  The
    optional bound(path, node, weight) callback returns True to prune.
    mark is used as the visited set and is restored before returning.
    """
    adj, primary, threshold = graph.adj, graph.primary, graph.threshold
    path = [start]
    weights = [0]
    stack = [iter(adj[start])]
    was_marked = mark[start]
    mark[start] = 1
    try:
        while stack:
            cur_weight = weights[-1]
            for nb, w in stack[-1]:
                nw = cur_weight + w
                if threshold is not None:
                    if nw >= threshold:
                        continue
                elif primary[nb] and primary[path[-1]] and len(path) > 1 and primary[path[-2]]:
                    continue
                if nb == close:
                    yield path, nb, nw
                    continue
                if mark[nb]:
                    continue
                if bound is not None and bound(path, nb, nw):
                    continue
                stats.nodes_expanded += 1
                mark[nb] = 1
                path.append(nb)
                weights.append(nw)
                stack.append(iter(adj[nb]))
                break
            else:
                stack.pop()
                weights.pop()
                mark[path.pop()] = 0
    finally:
        # restore on early exit (a consumer may stop iterating)
        for i in path:
            mark[i] = 0
        mark[start] = was_marked


def _bound_tables(graph: MeshGraph, close: int, guided: bool):
    """Per-target tables for _lower_bound, cached on the graph."""
    key = (close, guided)
    cached = graph._bound_cache.get(key)
    if cached is not None:
        return cached
    dist = graph.unit_distance(close)
    if not guided:
        # keep only the reachability part of the distance
        dist = tuple(0 if d < UNREACHABLE else d for d in dist)
    primary, port_of, adj = graph.primary, graph.port_of, graph.adj
    fresh = tuple(min((dist[port_of[q]] for q, _ in adj[i] if primary[q]), default=0) if primary[i] else 0
                  for i in range(len(graph.nodes)))
    graph._bound_cache[key] = (dist, fresh)
    return dist, fresh


def _lower_bound(graph: MeshGraph, close: int, guided: bool = False):
    """Least final weight still reachable after stepping to `nb` with weight nw.

    From a dummy node every completion crosses whole units, so the weight
    cannot drop; with guided=True it must also cover the unit distance to
    the goal.  A primary entered from outside must still take an internal
    edge and leave through a dummy edge, and a primary reached over an
    internal edge must leave through its own dummy.
    """
    primary, min_internal, port_of = graph.primary, graph.min_internal, graph.port_of
    w_dummy = graph.scheme.w_dummy
    dist, fresh = _bound_tables(graph, close, guided)

    def lb(path, nb, nw):
        if not primary[nb]:
            return nw + dist[nb]
        if primary[path[-1]]:
            return nw + w_dummy + dist[port_of[nb]]
        return nw + min_internal[nb] + w_dummy + fresh[nb]
    return lb


def dfs_all_paths(graph: MeshGraph, source, target, initial_visited: Optional[Iterable] = None) -> PathSet:
    """Every simple physical path from source to target, sorted by weight then nodes."""
    t0 = time.perf_counter()
    s, t, mark = _prepare(graph, source, target, initial_visited)
    stats = SearchStats()
    found = [_make_path(graph, p + [t], w) for p, _, w in _walk(graph, s, mark, stats, close=t)]
    found.sort(key=_sort_key)
    stats.elapsed = time.perf_counter() - t0
    return PathSet(found, stats)


def _best(graph: MeshGraph, start: int, close: int, mark: bytearray, stats: SearchStats,
          exact: Optional[int] = None, min_len: int = 2, guided: bool = False):
    """Depth-first branch and bound for the minimum (or an exact) weight walk.

    With guided=False the bound is the running weight itself, as in a
    plain weight-pruned DFS; guided=True adds the unit distance to the goal,
    which steers long searches on large meshes.

    Shortest searches deepen a weight limit: each pass prunes every branch
    whose lower bound exceeds the limit, and the next pass raises the limit
    to the smallest bound that was cut.  The first walk found within the
    limit is optimal and, since neighbours are expanded in canonical order,
    the lexicographically smallest optimum.
    """
    lb = _lower_bound(graph, close, guided)
    if exact is not None:
        def bound(path, nb, nw):
            return lb(path, nb, nw) > exact
        for p, last, w in _walk(graph, start, mark, stats, close=close, bound=bound):
            if len(p) >= min_len and w == exact:
                return p + [last], w
        return None, BIG

    limit = 1 if start == close else _bound_tables(graph, close, guided)[0][start]
    while limit < UNREACHABLE:
        cut = [UNREACHABLE]

        def bound(path, nb, nw):
            b = lb(path, nb, nw)
            if b > limit:
                if b < cut[0]:
                    cut[0] = b
                return True
            return False

        for p, last, w in _walk(graph, start, mark, stats, close=close, bound=bound):
            if len(p) < min_len:
                continue
            if w <= limit:
                return p + [last], w
            cut[0] = min(cut[0], w)
        limit = cut[0]
    return None, BIG


def dfs_shortest_path(graph: MeshGraph, source, target, initial_visited: Optional[Iterable] = None,
                      stats: Optional[SearchStats] = None, *, guided: bool = False) -> Optional[Path]:
    """Minimum-weight physical path, lexicographically smallest among ties; None if unroutable."""
    s, t, mark = _prepare(graph, source, target, initial_visited)
    seq, w = _best(graph, s, t, mark, stats or SearchStats(), guided=guided)
    return None if seq is None else _make_path(graph, seq, w)


def dfs_fixed_weight_path(graph: MeshGraph, source, target, weight: int,
                          initial_visited: Optional[Iterable] = None) -> Optional[Path]:
    """First physical path (in expansion order) whose total weight is exactly `weight`."""
    if weight < 1:
        raise SearchError("weight must be >= 1")
    s, t, mark = _prepare(graph, source, target, initial_visited)
    seq, w = _best(graph, s, t, mark, SearchStats(), exact=weight)
    return None if seq is None else _make_path(graph, seq, w)


def _parent(graph, parent, initial_visited):
    p = _endpoint(graph, parent, "parent")
    mark = _blocked(graph, initial_visited)
    if mark[p]:
        raise SearchError("parent is in the visited set")
    return p, mark


@dataclass
class CycleSearch:
    cycles: List[Cycle]
    raw_count: int
    search_stats: SearchStats = field(default_factory=SearchStats)

    def __len__(self):
        return len(self.cycles)

    def __iter__(self):
        return iter(self.cycles)

    def __getitem__(self, k):
        return self.cycles[k]


def dfs_cycles(graph: MeshGraph, parent, initial_visited: Optional[Iterable] = None, *,
               dedup: bool = True) -> CycleSearch:
    """Simple physical cycles through `parent`.

    The walk finds every cycle once in each direction; with dedup=True only
    the orientation with the smaller node sequence is kept.
    """
    t0 = time.perf_counter()
    p, mark = _parent(graph, parent, initial_visited)
    stats = SearchStats()
    raw = []
    for seq, last, w in _walk(graph, p, mark, stats, close=p):
        if len(seq) < 3:  # p-x-p walks back along one edge
            continue
        raw.append((tuple(seq), w))
    kept = raw
    if dedup:
        kept = []
        seen = set()
        for seq, w in raw:
            ring = seq[1:]
            key = (seq[0],) + min(ring, ring[::-1])
            if key not in seen:
                seen.add(key)
                kept.append((key, w))
    cycles = [_make_path(graph, list(seq) + [p], w, Cycle) for seq, w in kept]
    cycles.sort(key=_sort_key)
    stats.elapsed = time.perf_counter() - t0
    return CycleSearch(cycles, len(raw), stats)


def dfs_shortest_cycle(graph: MeshGraph, parent, initial_visited: Optional[Iterable] = None) -> Optional[Cycle]:
    p, mark = _parent(graph, parent, initial_visited)
    seq, w = _best(graph, p, p, mark, SearchStats(), min_len=3)
    return None if seq is None else _canonical_cycle(graph, seq, w)


def dfs_fixed_weight_cycle(graph: MeshGraph, parent, weight: int,
                           initial_visited: Optional[Iterable] = None) -> Optional[Cycle]:
    if weight < 1:
        raise SearchError("weight must be >= 1")
    p, mark = _parent(graph, parent, initial_visited)
    seq, w = _best(graph, p, p, mark, SearchStats(), exact=weight, min_len=3)
    return None if seq is None else _canonical_cycle(graph, seq, w)


def _canonical_cycle(graph, seq, w) -> Cycle:
    body = seq[1:-1]
    body = min(body, body[::-1])
    return _make_path(graph, [seq[0]] + list(body) + [seq[0]], w, Cycle)


def bidirectional_shortest(graph: MeshGraph, source, target, initial_visited: Optional[Iterable] = None,
                           stats: Optional[SearchStats] = None):
    """Breadth-first search from both ends, one whole frontier per step.

    Each side keeps a predecessor and running weight per reached node and
    only enqueues unvisited nodes whose weight stays below the threshold.
    When the two sides meet, the cheapest meeting node (smallest index on
    ties) is joined into a path.  The joined path is checked structurally,
    since neither half knows how the other entered the shared unit; a
    failed check returns NonphysicalIntersection.  Returns None when a
    frontier runs dry first.
    """
    s, t, mark = _prepare(graph, source, target, initial_visited)
    stats = stats or SearchStats()
    adj, threshold, primary = graph.adj, graph.threshold, graph.primary
    fwd = {s: (-1, 0)}
    bwd = {t: (-1, 0)}
    frontiers = [[s], [t]]
    sides = [fwd, bwd]
    turn = 0
    while frontiers[0] and frontiers[1]:
        seen = sides[turn]
        nxt = []
        for cur in frontiers[turn]:
            cw = seen[cur][1]
            prev = seen[cur][0]
            for nb, w in adj[cur]:
                if nb in seen or mark[nb]:
                    continue
                nw = cw + w
                if threshold is not None:
                    if nw >= threshold:
                        continue
                elif primary[nb] and primary[cur] and prev >= 0 and primary[prev]:
                    continue
                seen[nb] = (cur, nw)
                stats.nodes_expanded += 1
                nxt.append(nb)
        frontiers[turn] = nxt
        meet = [n for n in nxt if n in sides[1 - turn]]
        if meet:
            x = min(meet, key=lambda n: (fwd[n][1] + bwd[n][1], n))
            left = _trace(fwd, x)[::-1]
            right = _trace(bwd, x)[1:]
            seq = left + right
            weight = fwd[x][1] + bwd[x][1]
            nodes = tuple(graph.nodes[i] for i in seq)
            if not is_physical(nodes):
                return NonphysicalIntersection(graph.nodes[x], nodes, weight)
            return _make_path(graph, seq, weight)
        turn = 1 - turn
    return None


def _trace(side, x) -> List[int]:
    out = [x]
    while side[x][0] >= 0:
        x = side[x][0]
        out.append(x)
    return out


def dijkstra_baseline(graph: MeshGraph, source, target, initial_visited: Optional[Iterable] = None,
                      stats: Optional[SearchStats] = None) -> Optional[Path]:
    """Priority-queue search over (node, previous node) states.

    Keeping the previous node lets the queue refuse a third primary in a
    row and immediate reversals.  The queue is ordered by a potential that
    turns the negative edge weights into non-negative steps: the running
    weight plus the cheapest way to finish the unit currently being crossed.
    The final path is checked with is_physical, as a plain label-setting
    search cannot rule out revisiting a node.
    """
    s, t, mark = _prepare(graph, source, target, initial_visited)
    stats = stats or SearchStats()
    adj, primary, threshold = graph.adj, graph.primary, graph.threshold
    lb = _lower_bound(graph, t, True)
    start = (s, -1)
    dist = {start: 0}
    pred = {start: None}
    heap = [(0, 0, s, -1)]
    done = set()
    while heap:
        key, w, cur, prev = heapq.heappop(heap)
        state = (cur, prev)
        if state in done:
            continue
        done.add(state)
        stats.nodes_expanded += 1
        if cur == t:
            seq = []
            st = state
            while st is not None:
                seq.append(st[0])
                st = pred[st]
            seq.reverse()
            nodes = tuple(graph.nodes[i] for i in seq)
            if not is_physical(nodes):
                return None
            return _make_path(graph, seq, w)
        for nb, ew in adj[cur]:
            if nb == prev or mark[nb] or nb == s:
                continue
            nw = w + ew
            if threshold is not None:
                if nw >= threshold:
                    continue
            if primary[nb] and primary[cur] and prev >= 0 and primary[prev]:
                continue
            nstate = (nb, cur)
            if nstate in done or dist.get(nstate, BIG) <= nw:
                continue
            dist[nstate] = nw
            pred[nstate] = state
            heapq.heappush(heap, (lb([prev, cur] if prev >= 0 else [cur], nb, nw), nw, nb, cur))
    return None
