"""JSON round-trip and DOT export for mesh graphs."""
from __future__ import annotations

import json
from typing import Optional, Sequence

import numpy as np

from .mesh import (MeshGraph, MZIUnit, Path, WeightScheme, format_node_id, parse_node_id,
                   parse_unit_id)

GRAPH_FORMAT = "photonroute-mesh"
GRAPH_VERSION = 1

# distinct colours for path overlays, cycled when there are more paths
PALETTE = ("red", "green3", "blue", "darkorange", "purple", "cyan4", "magenta", "goldenrod", "brown", "gray30")


def _xy(p) -> list:
    return [round(float(p[0]), 9) + 0.0, round(float(p[1]), 9) + 0.0]


def graph_to_dict(graph: MeshGraph) -> dict:
    fmt = format_node_id
    return {
        "format": GRAPH_FORMAT,
        "version": GRAPH_VERSION,
        "meta": graph.meta,
        "scheme": graph.scheme.as_dict(),
        "threshold": graph.threshold,
        "nodes": [{"id": fmt(n), "role": "primary" if n.is_primary else "dummy", "pos": _xy(graph.positions[i])}
                  for i, n in enumerate(graph.nodes)],
        "edges": [[fmt(u), fmt(v), w] for u, v, w in graph.edges()],
        "units": [{"id": str(uid), "nodes": {k: fmt(n) for k, n in sorted(u.nodes.items())},
                   "position": _xy(u.position), "orientation": round(u.orientation, 9),
                   "length": round(u.length, 12), "port_offset": u.port_offset}
                  for uid, u in graph.units.items()],
        "aliases": {fmt(k): fmt(v) for k, v in graph.aliases.items()},
        "unit_aliases": {str(k): str(v) for k, v in graph.unit_aliases.items()},
        "inputs": [fmt(n) for n in graph.inputs],
        "outputs": [fmt(n) for n in graph.outputs],
    }


def graph_from_dict(data: dict) -> MeshGraph:
    if data.get("format") != GRAPH_FORMAT:
        raise ValueError("not a serialized mesh graph")
    if data.get("version") != GRAPH_VERSION:
        raise ValueError(f"unsupported graph format version {data.get('version')!r}")
    nodes = [parse_node_id(n["id"]) for n in data["nodes"]]
    positions = np.array([n["pos"] for n in data["nodes"]], dtype=float).reshape(-1, 2)
    edges = [(parse_node_id(u), parse_node_id(v), int(w)) for u, v, w in data["edges"]]
    units = {}
    for u in data["units"]:
        uid = parse_unit_id(u["id"])
        units[uid] = MZIUnit(uid, {k: parse_node_id(v) for k, v in u["nodes"].items()}, tuple(u["position"]),
                             float(u["orientation"]), float(u["length"]), u.get("port_offset"))
    return MeshGraph(nodes, positions, edges, units, scheme=WeightScheme(**data["scheme"]),
                     aliases={parse_node_id(k): parse_node_id(v) for k, v in data.get("aliases", {}).items()},
                     unit_aliases={parse_unit_id(k): parse_unit_id(v)
                                   for k, v in data.get("unit_aliases", {}).items()},
                     inputs=[parse_node_id(n) for n in data.get("inputs", [])],
                     outputs=[parse_node_id(n) for n in data.get("outputs", [])],
                     meta=data.get("meta", {}), threshold=data.get("threshold", -1))


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def dumps_graph(graph: MeshGraph) -> str:
    return dumps(graph_to_dict(graph))


def loads_graph(text: str) -> MeshGraph:
    return graph_from_dict(json.loads(text))


def save_graph(graph: MeshGraph, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_graph(graph))


def load_graph(path) -> MeshGraph:
    with open(path) as fh:
        return loads_graph(fh.read())


def _q(node) -> str:
    return '"' + format_node_id(node) + '"'


def to_dot(graph: MeshGraph, paths: Sequence[Path] = (), *, title: Optional[str] = None,
           scale: float = 72.0) -> str:
    """Graphviz text: dummy nodes dashed, primaries solid, optional coloured path overlays.

    Node positions are pinned (use neato -n or fdp to honour them).
    """
    lines = ["graph mesh {"]
    label = title or "mesh: {} units, {} nodes".format(graph.num_units, len(graph.nodes))
    lines.append(f'  graph [label="{label}", overlap=true, splines=false];')
    lines.append("  node [shape=circle, fixedsize=true, width=0.22, fontsize=6];")
    for i, n in enumerate(graph.nodes):
        x, y = graph.positions[i] * scale
        style = "solid" if n.is_primary else "dashed"
        lines.append(f'  {_q(n)} [pos="{x:.3f},{y:.3f}!", style={style}];')
    overlay = {}
    for k, p in enumerate(paths):
        for u, v in zip(p.nodes, p.nodes[1:]):
            overlay.setdefault(frozenset((u, v)), k)
    for u, v, w in graph.edges():
        attrs = [f'label="{w}"']
        k = overlay.get(frozenset((u, v)))
        if k is not None:
            attrs += [f"color={PALETTE[k % len(PALETTE)]}", "penwidth=3"]
        lines.append(f"  {_q(u)} -- {_q(v)} [{', '.join(attrs)}];")
    if paths:
        lines.append("  subgraph cluster_legend {")
        lines.append('    label="paths";')
        for k, p in enumerate(paths):
            colour = PALETTE[k % len(PALETTE)]
            text = f"path {k + 1}: {format_node_id(p.nodes[0])} to {format_node_id(p.nodes[-1])}, weight {p.total_weight}"
            lines.append(f'    "legend{k}" [shape=box, fixedsize=false, fontsize=10, color={colour}, '
                         f'fontcolor={colour}, label="{text}"];')
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_graph(graph: MeshGraph, fmt: str = "json", paths: Sequence[Path] = ()) -> str:
    fmt = fmt.lower()
    if fmt in ("json", "structured", "structuredtext"):
        return dumps_graph(graph)
    if fmt == "dot":
        return to_dot(graph, paths)
    raise ValueError(f"unknown export format {fmt!r}")
