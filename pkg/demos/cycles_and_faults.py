"""Cycles through a parent node, then three ways to keep a faulty unit out of routes."""
from photonroute import (Blacklist, InflateWeights, NetworkSpec, RemoveUnit, RoutingSession, build_hex_network,
                         dfs_cycles, parse_node_id)

g3 = build_hex_network(NetworkSpec(3))
found = dfs_cycles(g3, parse_node_id("ih2"))
print(f"cycles through i.h.2.0: {len(found)} ({found.raw_count} before removing reversed copies)")
for c in found:
    print(f"  weight {c.total_weight:2d}, units: {' '.join(str(u) for u in c.units)}")

g = build_hex_network(NetworkSpec(5))
s, t = parse_node_id("of01"), parse_node_id("oe21")
base = RoutingSession(g).find(s, t)
# fault a unit in the middle of the unfaulted route
unit = base.units[len(base.units) // 2]
print(f"\nno fault: weight {base.total_weight}, faulting {unit}")
for strategy in (Blacklist(), RemoveUnit(), InflateWeights(50)):
    session = RoutingSession(g).apply_fault(unit, strategy)
    res = session.find(s, t)
    uses = unit in getattr(res, "states_implied", {})
    print(f"{strategy.label():>10}: weight {getattr(res, 'total_weight', None)}, uses {unit}: {uses}")
