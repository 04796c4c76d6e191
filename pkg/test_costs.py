"""
Test suite for general cost pricing and the volume-delay function.
"""

import math
import unittest
from types import SimpleNamespace
import sys
import os

# Add the project root to the path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from routecog.costs import (
    CostWeights, EdgeState, VolumeDelayParams, congested_travel_time, edge_free_flow_time,
    edge_general_cost, link_financial_cost, price_edges, route_general_cost,
)
from routecog.errors import CostError
from routecog.network import Edge, Link, Route, fixture_network
from routecog.routing import brute_force_routes


def make_link(length=1000.0, cost_rate=0.0, supplement1=0.0, supplement2=0.0, road_quality=0.0, link_id="L1"):
    return Link(link_id, "A", "B", length, 1, 10.0, 1000.0, cost_rate, supplement1, supplement2, road_quality, "minor")


class FakeNetwork:
    """Just enough of a Network for edge pricing."""

    def __init__(self, *links):
        self.links = {link.id: link for link in links}


class TestLinkFinancialCost(unittest.TestCase):

    def test_examples(self):
        """length x cost_rate + supplement1."""
        self.assertAlmostEqual(link_financial_cost(make_link(1000.0, 0.01, 2.0)), 12.0, places=12)
        self.assertEqual(link_financial_cost(make_link(1000.0, 0.0, 0.0)), 0.0)
        self.assertAlmostEqual(link_financial_cost(make_link(500.0, 0.02, 0.0)), 10.0, places=12)


class TestEdgeGeneralCost(unittest.TestCase):

    def price(self, weights, travel_time, *links):
        edge = Edge("E1", tuple(link.id for link in links))
        return edge_general_cost(edge, EdgeState("E1", travel_time), weights, FakeNetwork(*links))

    def test_time_only(self):
        """Only the travel-time term is active."""
        self.assertEqual(self.price(CostWeights(1, 0, 0, 0), 300.0, make_link()), 300.0)

    def test_supplement2_unweighted(self):
        """supplement2 enters even when every weight is zero."""
        weights = SimpleNamespace(alpha=0.0, beta=0.0, gamma=0.0, delta=0.0)
        self.assertEqual(self.price(weights, 60.0, make_link(supplement2=7.0)), 7.0)

    def test_three_terms(self):
        """60 s + 1000 m x 0.001 + financial 12 = 73."""
        link = make_link(1000.0, 0.01, 2.0)
        self.assertAlmostEqual(self.price(CostWeights(1, 0.001, 1, 0), 60.0, link), 73.0, places=9)

    def test_sums_over_links(self):
        """Distance, financial cost, quality and supplement2 are summed per link."""
        a = make_link(400.0, 0.01, 1.0, 2.0, 0.5, "L1")
        b = make_link(600.0, 0.0, 3.0, 1.0, 0.25, "L2")
        cost = self.price(CostWeights(2, 0.1, 10, 4), 50.0, a, b)
        expected = 2 * 50.0 + 0.1 * 1000.0 + 10 * (4.0 + 1.0 + 3.0) + 4 * 0.75 + 3.0
        self.assertAlmostEqual(cost, expected, places=9)

    def test_linear_in_each_weight(self):
        """Doubling one weight doubles its term exactly."""
        link = make_link(800.0, 0.02, 1.5, 0.0, 0.3)
        base = {"alpha": 1.0, "beta": 0.5, "gamma": 2.0, "delta": 3.0}
        for name in base:
            zero = dict(base, **{name: 0.0})
            one = dict(base)
            two = dict(base, **{name: 2 * base[name]})
            c0 = self.price(CostWeights(**zero), 90.0, link)
            c1 = self.price(CostWeights(**one), 90.0, link)
            c2 = self.price(CostWeights(**two), 90.0, link)
            self.assertAlmostEqual(c2 - c0, 2 * (c1 - c0), places=9, msg=name)

    def test_state_mismatch(self):
        with self.assertRaises(CostError):
            edge_general_cost(Edge("E1", ("L1",)), EdgeState("E2", 10.0), CostWeights(1, 0, 0, 0),
                              FakeNetwork(make_link()))


class TestCostWeights(unittest.TestCase):

    def test_negative_weight(self):
        with self.assertRaises(CostError):
            CostWeights(-1, 0, 0, 0)

    def test_all_zero(self):
        with self.assertRaisesRegex(CostError, "at least one weight"):
            CostWeights(0, 0, 0, 0)


class TestRouteGeneralCost(unittest.TestCase):

    def test_sum(self):
        route = Route("Z1", "Z2", ("a", "b", "c"))
        self.assertEqual(route_general_cost(route, {"a": 10.0, "b": 20.0, "c": 30.0}), 60.0)

    def test_single_edge(self):
        self.assertEqual(route_general_cost(Route("Z1", "Z2", ("a",)), {"a": 42.0}), 42.0)

    def test_missing_edge(self):
        """The missing edge is named."""
        with self.assertRaisesRegex(CostError, "'b'"):
            route_general_cost(Route("Z1", "Z2", ("a", "b")), {"a": 1.0})

    def test_concatenation(self):
        """The cost of two joined partial routes is the sum of the parts."""
        costs = {"a": 1.5, "b": 2.25, "c": 3.0, "d": 0.125}
        whole = route_general_cost(Route("Z1", "Z2", ("a", "b", "c", "d")), costs)
        parts = route_general_cost(Route("Z1", "Z2", ("a", "b")), costs) + \
            route_general_cost(Route("Z1", "Z2", ("c", "d")), costs)
        self.assertAlmostEqual(whole, parts, places=12)

    def test_fixture_route_recomputed(self):
        """Z1->Z2 at free flow equals a recomputation from raw link attributes."""
        network = fixture_network()
        weights = CostWeights(1.0, 0.01, 60.0, 100.0)
        edge_costs = price_edges(network, weights)
        route = brute_force_routes(network, "Z1", "Z2")[0]

        expected = 0.0
        for edge_id in route.edge_ids:
            for link_id in network.edges[edge_id].link_ids:
                link = network.links[link_id]
                expected += (weights.alpha * link.length / link.free_flow_speed
                             + weights.beta * link.length
                             + weights.gamma * (link.length * link.cost_rate + link.supplement1)
                             + weights.delta * link.road_quality
                             + link.supplement2)
        self.assertAlmostEqual(route_general_cost(route, edge_costs), expected, places=6)
        self.assertTrue(all(cost > 0 and math.isfinite(cost) for cost in edge_costs.values()))


class TestCongestedTravelTime(unittest.TestCase):

    def test_zero_volume(self):
        self.assertEqual(congested_travel_time(60.0, 0.0, 1000.0, VolumeDelayParams()), 60.0)

    def test_at_capacity(self):
        self.assertAlmostEqual(congested_travel_time(60.0, 1000.0, 1000.0, VolumeDelayParams()), 69.0, places=9)

    def test_twice_capacity(self):
        self.assertAlmostEqual(congested_travel_time(60.0, 2000.0, 1000.0, VolumeDelayParams()), 3.4 * 60.0, places=9)

    def test_strictly_increasing(self):
        times = [congested_travel_time(30.0, v, 1800.0) for v in range(0, 5000, 250)]
        for before, after in zip(times, times[1:]):
            self.assertLess(before, after)

    def test_bad_params(self):
        with self.assertRaises(CostError):
            VolumeDelayParams(a=-0.1)
        with self.assertRaises(CostError):
            VolumeDelayParams(b=0.5)
        with self.assertRaises(CostError):
            congested_travel_time(0.0, 10.0, 100.0)

    def test_free_flow_edge_time(self):
        """Edge free-flow time is the sum of its links' length / speed."""
        network = fixture_network()
        edge = network.edges["Express1:N13-C1"]
        expected = sum(network.links[l].length / network.links[l].free_flow_speed for l in edge.link_ids)
        self.assertAlmostEqual(edge_free_flow_time(network, edge.id), expected, places=12)


if __name__ == '__main__':
    unittest.main(verbosity=2)
