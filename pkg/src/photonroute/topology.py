"""Builders for unit cells, hexagonal multi-cell networks and switch fabrics."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .mesh import (DEFAULT_SCHEME, Circle, GraphBuilder, GraphConstructionError, MeshGraph, MZIUnit,
                   NodeId, UnitId, WeightScheme, make_unit)

SQRT3 = math.sqrt(3.0)

# neighbour directions around the central cell, relative to the default
# start angle; ring 1 is filled in this order, then the ring-2 corners
CELL_DIRECTIONS = (30.0, 90.0, 270.0, 210.0, 150.0, 330.0)


@dataclass(frozen=True)
class CellSpec:
    """One ring of inner MZIs on a polygon plus radial outer MZIs.

    r_inner is the apothem of the inner polygon (distance from the centre
    to the middle of an inner MZI) and r_outer the distance to the middle of
    an outer MZI.  Inner MZI r sits at angle start_angle - r * 360 / n_inner
    and runs clockwise; outer MZI r is a spoke at that angle plus
    outer_offset, entered from the rim.
    """
    cell_index: int = 0
    center: Tuple[float, float] = (0.0, 0.0)
    r_inner: float = 1.0
    r_outer: float = SQRT3
    n_inner: int = 6
    n_outer: int = 6
    outer_offset: float = 30.0
    start_angle: float = 30.0

    def __post_init__(self):
        if self.n_inner < 1 or self.n_outer < 0:
            raise ValueError("need n_inner >= 1 and n_outer >= 0")
        if not (self.r_outer > self.r_inner > 0):
            raise ValueError("need r_outer > r_inner > 0")
        if self.n_outer and self.r_outer <= self.vertex_radius:
            raise ValueError(f"r_outer must exceed the inner polygon's circumradius {self.vertex_radius:.6g}")

    @property
    def vertex_radius(self) -> float:
        if self.n_inner < 3:
            return self.r_inner
        return self.r_inner / math.cos(math.pi / self.n_inner)

    @property
    def inner_length(self) -> float:
        if self.n_inner < 3:
            return self.r_inner
        return 2.0 * self.r_inner * math.tan(math.pi / self.n_inner)

    @property
    def outer_length(self) -> float:
        return 2.0 * (self.r_outer - self.vertex_radius)

    @property
    def port_offset(self) -> float:
        lengths = [self.inner_length] + ([self.outer_length] if self.n_outer else [])
        return 0.2 * min(lengths)

    def is_honeycomb(self) -> bool:
        return (self.n_inner == 6 and self.n_outer == 6
                and math.isclose(self.r_outer, SQRT3 * self.r_inner, rel_tol=1e-9)
                and math.isclose((self.outer_offset - 30.0) % 60.0, 0.0, abs_tol=1e-9))

    def units(self) -> List[MZIUnit]:
        cx, cy = self.center
        s = self.port_offset
        out = []
        L = self.inner_length
        for r in range(self.n_inner):
            theta = self.start_angle - r * 360.0 / self.n_inner
            t = math.radians(theta)
            pos = (cx + self.r_inner * math.cos(t), cy + self.r_inner * math.sin(t))
            out.append(make_unit(r, self.cell_index, Circle.INNER, pos, theta - 90.0, length=L, port_offset=s))
        L = self.outer_length if self.n_outer else 0.0
        for r in range(self.n_outer):
            phi = self.start_angle + self.outer_offset - r * 360.0 / self.n_outer
            t = math.radians(phi)
            pos = (cx + self.r_outer * math.cos(t), cy + self.r_outer * math.sin(t))
            out.append(make_unit(r, self.cell_index, Circle.OUTER, pos, phi + 180.0, length=L, port_offset=s))
        return out


def _tolerance(spec_tol: Optional[float], cell: CellSpec) -> float:
    return spec_tol if spec_tol is not None else 1e-6 * cell.r_inner


def build_unit_cell(spec: CellSpec = CellSpec(), *, scheme: WeightScheme = DEFAULT_SCHEME,
                    merge_tolerance: Optional[float] = None) -> MeshGraph:
    b = GraphBuilder(scheme, tolerance=_tolerance(merge_tolerance, spec), clearance=0.1 * spec.port_offset)
    for unit in spec.units():
        b.add_unit(unit)
    g = b.build(meta={"kind": "cell", "num_cells": 1})
    return _with_ports(g)


def _with_ports(g: MeshGraph) -> MeshGraph:
    ports = g.ports()
    g.inputs = tuple(ports)
    g.outputs = tuple(ports)
    return g


@dataclass(frozen=True)
class NetworkSpec:
    num_cells: int = 1
    cell: CellSpec = CellSpec()
    merge_tolerance: Optional[float] = None

    def __post_init__(self):
        if self.num_cells < 1:
            raise ValueError("num_cells must be >= 1")


def cell_centers(num_cells: int, spacing: float = 2.0, rotation: float = 0.0) -> np.ndarray:
    """Centres of the first num_cells cells on a hexagonal lattice.

    Cell 0 is at the origin.  Ring k (k >= 1) lists its six corner cells in
    CELL_DIRECTIONS order, then the cells between corners, walking from each
    corner towards the next one in the same order.
    """
    dirs = [np.array([math.cos(math.radians(a + rotation)), math.sin(math.radians(a + rotation))])
            for a in CELL_DIRECTIONS]
    by_angle = sorted(range(6), key=lambda k: (CELL_DIRECTIONS[k]) % 360)
    out = [np.zeros(2)]
    k = 1
    while len(out) < num_cells:
        ring = [k * spacing * d for d in dirs]
        for i in range(6):
            # step from corner i towards the corner 60 degrees further on
            pos = by_angle.index(i)
            nxt = by_angle[(pos + 1) % 6]
            step = (dirs[nxt] - dirs[i]) * spacing
            for t in range(1, k):
                ring.append(k * spacing * dirs[i] + t * step)
        out.extend(ring)
        k += 1
    return np.array(out[:num_cells])


def build_hex_network(spec: NetworkSpec = NetworkSpec(), *, scheme: WeightScheme = DEFAULT_SCHEME) -> MeshGraph:
    base = spec.cell
    if spec.num_cells > 1 and not base.is_honeycomb():
        raise ValueError("multi-cell tiling needs n_inner = n_outer = 6, r_outer = sqrt(3) * r_inner "
                         "and a 30 degree outer offset")
    centers = cell_centers(spec.num_cells, 2.0 * base.r_inner, base.start_angle - 30.0)
    centers = centers + np.asarray(base.center, dtype=float)
    b = GraphBuilder(scheme, tolerance=_tolerance(spec.merge_tolerance, base), clearance=0.1 * base.port_offset)
    for q, c in enumerate(centers):
        cell = replace(base, cell_index=q, center=(float(c[0]), float(c[1])))
        for unit in cell.units():
            b.add_unit(unit)
    g = b.build(meta={"kind": "hex", "num_cells": spec.num_cells})
    return _with_ports(g)


def build_chain(length: int, *, merged: bool = True, scheme: WeightScheme = DEFAULT_SCHEME) -> MeshGraph:
    """Units in a row, output ports of one feeding the input ports of the next.

    With merged=False the ports stay separate and are joined by w_link edges.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    b = GraphBuilder(scheme)
    prev = None
    for k in range(length):
        unit = b.add_unit(make_unit(k, 0, Circle.INNER, (2.0 * k, 0.0), 0.0))
        if prev is not None:
            pair = (b.identify if merged else b.link)
            pair(prev.nodes["g"], unit.nodes["e"])
            pair(prev.nodes["h"], unit.nodes["f"])
        prev = unit
    first = b.units[UnitId(Circle.INNER, 0, 0)]
    g = b.build(inputs=[first.nodes["e"], first.nodes["f"]], outputs=[prev.nodes["g"], prev.nodes["h"]],
                meta={"kind": "chain", "length": length, "merged": merged}, geometric=False)
    return g


class FabricTopology(str, enum.Enum):
    BENES = "benes"
    CROSSBAR = "crossbar"


@dataclass(frozen=True)
class SwitchFabricSpec:
    n: int = 4
    topology: FabricTopology = FabricTopology.BENES

    def __post_init__(self):
        object.__setattr__(self, "topology", FabricTopology(self.topology))
        if self.n < 2 or self.n & (self.n - 1):
            raise ValueError(f"unsupported port count {self.n}: need a power of two >= 2")


# a port of a fabric switch: (stage, switch, port 0/1)
Port = Tuple[int, int, int]


@dataclass
class FabricLayout:
    stages: List[int]  # switches per stage
    links: Dict[Port, Port]  # output port -> input port of a later stage
    inputs: List[Port]  # fabric input wire -> switch input port
    outputs: List[Port]  # fabric output wire -> switch output port
    rows: Dict[Tuple[int, int], float] = field(default_factory=dict)  # drawing row of each switch


def benes_layout(n: int) -> FabricLayout:
    """Recursive Benes network: 2 log2(n) - 1 stages of n/2 switches."""
    if n == 2:
        return FabricLayout([1], {}, [(0, 0, 0), (0, 0, 1)], [(0, 0, 0), (0, 0, 1)], {(0, 0): 0.5})
    half = n // 2
    sub = benes_layout(half)
    width = half // 2  # switches per stage in each sub-network
    depth = len(sub.stages)
    last = depth + 1
    links: Dict[Port, Port] = {}
    rows: Dict[Tuple[int, int], float] = {}
    for j in range(half):
        rows[(0, j)] = 2 * j + 0.5
        rows[(last, j)] = 2 * j + 0.5
        # switch j sends port 0 to the upper half, port 1 to the lower half
        links[(0, j, 0)] = (1,) + sub.inputs[j][1:]
        links[(0, j, 1)] = (1, sub.inputs[j][1] + width, sub.inputs[j][2])
    for off, shift in ((0, 0.0), (width, float(half))):
        for (s, j, p), (s2, j2, p2) in sub.links.items():
            links[(s + 1, j + off, p)] = (s2 + 1, j2 + off, p2)
        for (s, j), row in sub.rows.items():
            rows[(s + 1, j + off)] = row + shift
    for i in range(half):
        s, j, p = sub.outputs[i]
        links[(s + 1, j, p)] = (last, i, 0)
        links[(s + 1, j + width, p)] = (last, i, 1)
    inputs = [(0, i // 2, i % 2) for i in range(n)]
    outputs = [(last, i // 2, i % 2) for i in range(n)]
    return FabricLayout([half] * (last + 1), links, inputs, outputs, rows)


def brickwall_layout(n: int) -> FabricLayout:
    """n stages of 2x2 switches on alternating even/odd wire pairs, n(n-1)/2 switches."""
    stages: List[int] = []
    links: Dict[Port, Port] = {}
    rows: Dict[Tuple[int, int], float] = {}
    open_port: List[Optional[Port]] = [None] * n
    inputs: List[Optional[Port]] = [None] * n
    for s in range(n):
        j = 0
        for x in range(s % 2, n - 1, 2):
            rows[(len(stages), j)] = x + 0.5
            for p, wire in enumerate((x, x + 1)):
                port = (len(stages), j, p)
                if open_port[wire] is None:
                    inputs[wire] = port
                else:
                    links[open_port[wire]] = port
                open_port[wire] = port
            j += 1
        if j:
            stages.append(j)
    return FabricLayout(stages, links, list(inputs), list(open_port), rows)


def build_switch_fabric(spec: SwitchFabricSpec = SwitchFabricSpec(), *,
                        scheme: WeightScheme = DEFAULT_SCHEME) -> MeshGraph:
    """Staged fabric of 2x2 units; stage = cell index, switch = unit index.

    Input port 0 of a switch is its e/a side, port 1 its f/b side; output
    port 0 is g/c and port 1 is h/d.  Stage interconnects are merged dummy
    nodes, named after the earlier stage.
    """
    layout = benes_layout(spec.n) if spec.topology is FabricTopology.BENES else brickwall_layout(spec.n)
    b = GraphBuilder(scheme)
    for s, count in enumerate(layout.stages):
        for j in range(count):
            row = layout.rows.get((s, j), 2.0 * j)
            b.add_unit(make_unit(j, s, Circle.NONE, (3.0 * s, -2.0 * row), 0.0))

    def in_node(port: Port) -> NodeId:
        s, j, p = port
        return UnitId(Circle.NONE, j, s).node("ef"[p])

    def out_node(port: Port) -> NodeId:
        s, j, p = port
        return UnitId(Circle.NONE, j, s).node("gh"[p])

    for src, dst in sorted(layout.links.items()):
        b.identify(out_node(src), in_node(dst))
    g = b.build(inputs=[in_node(p) for p in layout.inputs], outputs=[out_node(p) for p in layout.outputs],
                meta={"kind": "fabric", "n": spec.n, "topology": spec.topology.value,
                      "stages": len(layout.stages)},
                geometric=False)
    return g


def network_from_config(config: dict) -> MeshGraph:
    """Build a graph from a plain dict, as read from a build config file."""
    kind = config.get("kind", "hex")
    if kind == "fabric":
        return build_switch_fabric(SwitchFabricSpec(int(config.get("n", 4)), config.get("topology", "benes")))
    if kind == "chain":
        return build_chain(int(config.get("length", 1)), merged=bool(config.get("merged", True)))
    if kind not in ("hex", "cell"):
        raise ValueError(f"unknown network kind {kind!r}")
    cell_keys = {"r_inner", "r_outer", "n_inner", "n_outer", "outer_offset", "start_angle"}
    cell_args = {k: config[k] for k in cell_keys if k in config}
    if "r_inner" in cell_args and "r_outer" not in cell_args:
        cell_args["r_outer"] = SQRT3 * float(cell_args["r_inner"])
    cell = CellSpec(**cell_args)
    tol = config.get("merge_tolerance")
    if kind == "cell":
        return build_unit_cell(cell, merge_tolerance=tol)
    return build_hex_network(NetworkSpec(int(config.get("num_cells", 1)), cell, tol))
