import random

import pytest

from oracles import fabric_switch_oracle
from photonroute import (Blacklist, EngagementConflict, HashList, HashListMismatch, InflateWeights, Path,
                         RemoveUnit, RoutingSession, SwitchFabricSpec, Unroutable, build_chain, build_hash_list,
                         build_switch_fabric, dfs_shortest_path, enumerate_fabric_permutations, hash_list_route,
                         is_physical, parse_fault_strategy, parse_node_id, parse_unit_id)

CASE_I = [("of33", "oe01"), ("oe33", "of01"), ("of11", "oe02"), ("oe21", "of02")]
CASE_II = [("of33", "oe01"), ("oe33", "of01"), ("of11", "of02"), ("oe21", "oe02"), ("oe23", "of42"),
           ("of13", "oe52")]
CASE_III = [("of33", "oe01"), ("oe33", "of01"), ("of11", "of52"), ("oe21", "oe42"), ("of34", "oe02"),
            ("oe34", "of02"), ("oe13", "oe54")]
ORDER_1 = [("oe23", "of42"), ("of13", "oe52"), ("of33", "oe01"), ("oe33", "of01"), ("oe21", "oe02"),
           ("of11", "oe52"), ("of34", "oe11")]
ORDER_2 = [("of33", "oe01"), ("oe33", "of01"), ("oe21", "oe02"), ("of11", "of02"), ("of34", "oe11"),
           ("oe23", "of42"), ("of13", "oe52")]


def pairs_of(names):
    return [(parse_node_id(a), parse_node_id(b)) for a, b in names]


def assert_disjoint(paths):
    seen = set()
    for p in paths:
        assert is_physical(p.nodes)
        assert not seen & set(p.nodes)
        seen |= set(p.nodes)


class TestMultiRoute:
    def test_case_one(self, net5):
        res = RoutingSession(net5).route_multi(pairs_of(CASE_I))
        assert res.success_count == 4
        assert [p.total_weight for p in res.outcomes] == [9, 9, 5, 8]
        assert_disjoint(res.routed)

    def test_case_two(self, net5):
        res = RoutingSession(net5).route_multi(pairs_of(CASE_II))
        assert res.success_count == 5
        assert isinstance(res.outcomes[-1], Unroutable)
        assert_disjoint(res.routed)

    def test_case_three(self, net5):
        res = RoutingSession(net5).route_multi(pairs_of(CASE_III))
        assert res.success_count == 7
        assert_disjoint(res.routed)

    def test_listed_orders(self, net5):
        assert RoutingSession(net5).route_multi(pairs_of(ORDER_1)).success_count == 5
        assert RoutingSession(net5).route_multi(pairs_of(ORDER_2)).success_count == 4

    def test_order_matters(self, net5):
        rotated = ORDER_2[3:] + ORDER_2[:3]
        a = RoutingSession(net5).route_multi(pairs_of(ORDER_2))
        b = RoutingSession(net5).route_multi(pairs_of(rotated))
        assert (a.success_count, b.success_count) == (4, 6)
        assert_disjoint(a.routed)
        assert_disjoint(b.routed)

    def test_two_pair_order(self, net5):
        first, second = ("of44", "oe44"), ("of33", "of54")
        assert RoutingSession(net5).route_multi(pairs_of([first, second])).success_count == 2
        assert RoutingSession(net5).route_multi(pairs_of([second, first])).success_count == 1

    def test_request_ids(self, net5):
        s = RoutingSession(net5)
        res = s.route_multi(pairs_of(CASE_I))
        assert res.request_ids == ["r1", "r2", "r3", "r4"]
        assert set(s.allocated) == set(res.request_ids)


class TestSession:
    def test_engage_and_release(self, net5, nid):
        s = RoutingSession(net5)
        p = s.route(nid(net5, "of33"), nid(net5, "of01"))
        assert isinstance(p, Path)
        assert set(p.nodes) <= s.engaged_nodes
        again = s.route(nid(net5, "of33"), nid(net5, "oe01"))
        assert isinstance(again, Unroutable) and "engaged" in again.reason
        s.release("r1")
        assert not s.engaged_nodes
        with pytest.raises(KeyError):
            s.release("r1")

    def test_engage_conflict(self, net5, nid):
        s = RoutingSession(net5)
        p = dfs_shortest_path(net5, nid(net5, "of33"), nid(net5, "of01"))
        s.engage(p)
        with pytest.raises(EngagementConflict):
            s.engage(p)

    def test_round_trip(self, net5):
        s = RoutingSession(net5)
        s.apply_fault(parse_unit_id("i.0.2"), Blacklist())
        s.route_multi(pairs_of(CASE_I))
        t = RoutingSession.from_dict(net5, s.to_dict())
        assert t.to_dict() == s.to_dict()
        assert t.engaged_nodes == s.engaged_nodes

    def test_round_trip_other_graph(self, net3, net5):
        with pytest.raises(HashListMismatch):
            RoutingSession.from_dict(net3, RoutingSession(net5).to_dict())

    def test_find_leaves_state(self, net5, nid):
        s = RoutingSession(net5)
        s.find(nid(net5, "of33"), nid(net5, "of01"))
        assert not s.engaged_nodes and not s.allocated

    @pytest.mark.parametrize("algo", ["dijkstra", "bidir"])
    def test_other_algorithms(self, net5, nid, algo):
        p = RoutingSession(net5).route(nid(net5, "of33"), nid(net5, "of01"), algorithm=algo)
        assert p.total_weight == 9


class TestFaults:
    def test_parse(self):
        assert parse_fault_strategy("blacklist") == Blacklist()
        assert parse_fault_strategy("remove") == RemoveUnit()
        assert parse_fault_strategy("inflate:50") == InflateWeights(50)
        for bad in ("inflate:0", "inflate:x", "melt"):
            with pytest.raises(ValueError):
                parse_fault_strategy(bad)

    def test_blacklist_avoided(self, net5):
        s = RoutingSession(net5)
        unit = parse_unit_id("i.3.0")
        s.apply_fault(unit, Blacklist())
        banned = set(net5.units[unit].nodes.values())
        rng = random.Random(4)
        ports = [p for p in net5.ports() if p not in banned]
        for _ in range(30):
            res = s.find(*rng.sample(ports, 2))
            if isinstance(res, Path):
                assert not banned & set(res.nodes)

    def test_remove(self, net5, nid):
        s = RoutingSession(net5)
        s.apply_fault(parse_unit_id("o.3.3"), RemoveUnit())
        assert parse_unit_id("o.3.3") not in s.graph.units
        assert s.graph.num_units == 35
        res = s.find(nid(net5, "of01"), nid(net5, "oe21"))
        assert isinstance(res, Path)
        res = s.find(nid(net5, "of33"), nid(net5, "of01"))
        assert isinstance(res, Unroutable)

    def test_inflate_still_routes_when_forced(self, net5, nid):
        s = RoutingSession(net5)
        s.apply_fault(parse_unit_id("o.3.3"), InflateWeights(100))
        p = s.find(nid(net5, "of33"), nid(net5, "of01"))
        assert isinstance(p, Path)
        assert p.total_weight == 9 + 100
        assert parse_unit_id("o.3.3") in p.states_implied

    def test_inflate_steers_around(self):
        g = build_chain(1)
        s = RoutingSession(g)
        s.apply_fault(parse_unit_id("i.0.0"), InflateWeights(7))
        p = s.find(parse_node_id("ie0"), parse_node_id("ig0"))
        assert p.total_weight == 8 and p.units_traversed == 1

    def test_unknown_unit(self, net5):
        with pytest.raises(KeyError):
            RoutingSession(net5).apply_fault("i.9.9", Blacklist())


class TestHashList:
    def test_generate_and_route(self):
        g = build_switch_fabric(SwitchFabricSpec(4))
        table = build_hash_list(g, g.inputs, g.outputs)
        assert len(table) == 16
        s = RoutingSession(g)
        first = hash_list_route(table, s, (g.inputs[0], g.outputs[0]))
        assert isinstance(first, Path)
        second = hash_list_route(table, s, (g.inputs[1], g.outputs[1]))
        assert isinstance(second, Path)
        assert not set(first.nodes) & set(second.nodes)

    def test_round_trip(self):
        g = build_switch_fabric(SwitchFabricSpec(4))
        table = build_hash_list(g, g.inputs, g.outputs)
        back = HashList.from_dict(table.to_dict(), g)
        assert back.to_dict() == table.to_dict()
        other = build_switch_fabric(SwitchFabricSpec(4, "crossbar"))
        with pytest.raises(HashListMismatch):
            HashList.from_dict(table.to_dict(), other)

    def test_missing_pair(self):
        g = build_switch_fabric(SwitchFabricSpec(4))
        table = build_hash_list(g, g.inputs[:1], g.outputs)
        with pytest.raises(KeyError):
            table.lookup(g.inputs[1], g.outputs[0])


class TestFabric:
    @pytest.mark.parametrize("topology", ["benes", "crossbar"])
    def test_four_port_matches_oracle(self, topology):
        g = build_switch_fabric(SwitchFabricSpec(4, topology))
        found = enumerate_fabric_permutations(g)
        assert found == fabric_switch_oracle(g)
        assert len(found) == 24

    def test_paths_are_disjoint(self):
        g = build_switch_fabric(SwitchFabricSpec(4))
        for perm, paths in enumerate_fabric_permutations(g, with_paths=True).items():
            assert_disjoint(paths)
            for i, p in enumerate(paths):
                assert p.nodes[0] == g.inputs[i] and p.nodes[-1] == g.outputs[perm[i]]

    def test_two_port(self):
        g = build_switch_fabric(SwitchFabricSpec(2))
        assert enumerate_fabric_permutations(g) == {(0, 1), (1, 0)}
