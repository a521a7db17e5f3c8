"""Sequential multi-pair routing: engaged nodes block later requests, so order matters."""
from photonroute import NetworkSpec, Path, RoutingSession, build_hex_network, parse_node_id, to_dot

g = build_hex_network(NetworkSpec(5))

pairs = [("of33", "oe01"), ("oe33", "of01"), ("oe21", "oe02"), ("of11", "of02"), ("of34", "oe11"),
         ("oe23", "of42"), ("of13", "oe52")]


def run(order, label):
    session = RoutingSession(g)
    res = session.route_multi([(parse_node_id(a), parse_node_id(b)) for a, b in order])
    print(f"{label}: {res.success_count}/{len(order)} routed in {res.elapsed * 1e3:.1f} ms")
    for (a, b), out in zip(order, res.outcomes):
        if isinstance(out, Path):
            print(f"  {a:>5} -> {b:<5} weight {out.total_weight}")
        else:
            print(f"  {a:>5} -> {b:<5} unroutable ({out.reason})")
    return res


first = run(pairs, "listed order")
second = run(pairs[3:] + pairs[:3], "rotated order")

with open("multi_route.dot", "w") as fh:
    fh.write(to_dot(g, second.routed, title="rotated order"))
print("wrote multi_route.dot")
