"""Path search and routing on graphs of Mach-Zehnder interferometer meshes."""
from .mesh import (DEFAULT_SCHEME, Circle, Cycle, GraphBuilder, GraphConstructionError, MeshGraph, MZIUnit, NodeId,
                   NodeIdError, Path, UnitId, UnitState, UnknownNode, WeightScheme, derive_weight_scheme,
                   format_node_id, implied_states, is_physical, make_unit, parse_node_id, parse_unit_id,
                   path_weight, unit_state_of)
from .topology import (CellSpec, FabricTopology, NetworkSpec, SwitchFabricSpec, build_chain, build_hex_network,
                       build_switch_fabric, build_unit_cell, cell_centers, network_from_config)
from .search import (CycleSearch, NonphysicalIntersection, PathSet, SearchError, SearchStats,
                     bidirectional_shortest, dfs_all_paths, dfs_cycles, dfs_fixed_weight_cycle,
                     dfs_fixed_weight_path, dfs_shortest_cycle, dfs_shortest_path, dijkstra_baseline)
from .routing import (Blacklist, EngagementConflict, HashList, HashListMismatch, InflateWeights, MultiRouteResult,
                      RemoveUnit, RoutingSession, Unroutable, build_hash_list, enumerate_fabric_permutations,
                      hash_list_route, parse_fault_strategy)
from .bench import BenchConfig, BenchReport, emit_table, run_bench
from .serialize import export_graph, graph_from_dict, graph_to_dict, load_graph, save_graph, to_dot

__version__ = "0.1.0"
