"""Single-pair and all-path searches on the five-cell mesh.

Writes a DOT file with the shortest path and two longer alternatives.
Render with:  neato -n -Tpng route_paths.dot -o route_paths.png
"""
from photonroute import (NetworkSpec, bidirectional_shortest, build_hex_network, dfs_all_paths,
                         dfs_shortest_path, dijkstra_baseline, parse_node_id, to_dot)

g = build_hex_network(NetworkSpec(5))
print(g)

s, t = g.resolve(parse_node_id("of33")), g.resolve(parse_node_id("of01"))
p = dfs_shortest_path(g, s, t)
print(f"shortest {s} -> {t}: {p.units_traversed} units, weight {p.total_weight}")
print("  states:", ", ".join(f"{u}={st.value}" for u, st in p.states_implied.items()))
print("dijkstra weight:", dijkstra_baseline(g, s, t).total_weight)
print("bidirectional weight:", bidirectional_shortest(g, s, t).total_weight)

# two ports on the same side of one unit: the bidirectional search meets
# inside that unit and cannot join the halves
a, b = g.resolve(parse_node_id("of33")), g.resolve(parse_node_id("oe33"))
print("bidirectional on parallel ports:", type(bidirectional_shortest(g, a, b)).__name__)
print("dfs on parallel ports:", dfs_shortest_path(g, a, b).units_traversed, "units")

everything = dfs_all_paths(g, s, parse_node_id("oe21"))
w = everything.weights
print(f"all paths of33 -> oe21: {len(everything)}, weights {w[0]}..{w[-1]}")

picks = [everything[0], everything[len(everything) // 2], everything[-1]]
with open("route_paths.dot", "w") as fh:
    fh.write(to_dot(g, picks, title="of33 to oe21"))
print("wrote route_paths.dot")
