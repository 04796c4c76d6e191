"""
Guided demo of the routecog route-choice simulator.
This script walks through pricing, route choice, cognition and a short assignment run.
"""

import sys
import os

# Add the project root to the path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from routecog import (
    ChoiceParams, ChoiceSet, EnvironmentEvent, FeatureLibrary, SimulationConfig,
    fixture_network, fixture_od, packet_stream, resense_stream, run_assignment,
)
from routecog.choice import kirchhoff_probabilities, logit_probabilities, utilities
from routecog.cognition import build_packets, decide, perceive, resense
from routecog.costs import price_edges, route_general_cost
from routecog.network import corridor_inventory
from routecog.routing import RouteQuery, k_shortest_routes


def demo_header():
    """Print demo header."""
    print("🚦" + "=" * 78 + "🚦")
    print("   ROUTECOG - ROUTE-CHOICE SIMULATOR DEMO")
    print("🚦" + "=" * 78 + "🚦")
    print()
    print("This demo prices routes on the bundled 12-zone network and lets drivers choose.")
    print()


def demo_1_network():
    """Demo 1: The bundled network."""
    print("📋 DEMO 1: The 12-Zone Network")
    print("-" * 50)
    network = fixture_network()
    print(f"   • Zones: {', '.join(network.zone_ids)}")
    print(f"   • Nodes: {len(network.nodes)}, links: {len(network.links)}, edges: {len(network.edges)}")
    for road_class, count in corridor_inventory(network).items():
        print(f"   • {road_class} corridors: {count}")
    print()


def demo_2_choice_models():
    """Demo 2: Logit against Kirchhoff on short and long trips."""
    print("📋 DEMO 2: Logit vs Kirchhoff")
    print("-" * 50)
    for costs in ([5.0, 10.0], [105.0, 110.0]):
        values = utilities(costs)
        logit = logit_probabilities(values, 1.0)
        kirchhoff = kirchhoff_probabilities(values, 1.0)
        print(f"Costs {costs[0]:g} and {costs[1]:g} (5 minutes apart):")
        print(f"   logit     {logit[0]:.4f} / {logit[1]:.4f}")
        print(f"   kirchhoff {kirchhoff[0]:.4f} / {kirchhoff[1]:.4f}")
    print()
    print("💡 Kirchhoff depends on the cost ratio, so a 5-minute gap matters more on a short trip.")
    print()


def demo_3_routes():
    """Demo 3: k shortest routes between two zones."""
    print("📋 DEMO 3: Candidate Routes Z1 → Z11")
    print("-" * 50)
    network = fixture_network()
    config = SimulationConfig()
    costs = price_edges(network, config.weights_for("default"))
    for rank, route in enumerate(k_shortest_routes(network, RouteQuery("Z1", "Z11", 3, costs)), 1):
        print(f"{rank}. cost {route_general_cost(route, costs):.2f}")
        print(f"   🛣️  {route}")
    print()


def demo_4_cognition():
    """Demo 4: Perceive, retrieve, reason, then re-sense after an incident."""
    print("📋 DEMO 4: Driver Cognition")
    print("-" * 50)
    network = fixture_network()
    config = SimulationConfig()
    costs = price_edges(network, config.weights_for("default"))
    routes = k_shortest_routes(network, RouteQuery("Z1", "Z11", 3, costs))
    candidates = ChoiceSet(tuple(routes), tuple(route_general_cost(r, costs) for r in routes))

    packet = build_packets([("Z1", "Z11", 800.0)])[0]
    library = FeatureLibrary()
    stream = packet_stream(config.seed, packet.id)
    route = decide(packet, library, candidates, ChoiceParams(), stream)
    print(f"Feature key: {perceive(packet)}")
    print(f"   Empty library, so the driver reasons: {route}")

    library.evaluate_and_store(perceive(packet), route, route_general_cost(route, costs))
    print(f"   Stored. Library now holds {len(library)} entry")

    event = EnvironmentEvent(at=0.0, weather="rain")
    route = resense(packet, event, library, candidates, ChoiceParams(),
                    resense_stream(config.seed, 0, packet.id, 1))
    print(f"After rain the key changes to {perceive(packet)}")
    print(f"   No memory for rain yet, so the driver reasons again: {route}")
    print()


def demo_5_assignment():
    """Demo 5: A short assignment run with and without cognition."""
    print("📋 DEMO 5: Assignment (5 iterations)")
    print("-" * 50)
    network = fixture_network()
    od = fixture_od()
    config = SimulationConfig(max_iterations=5, stop_on_convergence=False)
    for cognition in (True, False):
        result = run_assignment(network, od, config.with_overrides(cognition=cognition))
        print(f"Cognition {'on' if cognition else 'off'}:")
        for report in result.reports:
            print(f"   {report.iteration}: avg cost {report.average_travel_cost:10.2f}  "
                  f"search {report.route_search_time * 1000:8.2f} ms  hit rate {report.cache_hit_rate:.2f}")
    print()


def main():
    """Run the guided demo."""
    demo_header()

    demo_1_network()
    demo_2_choice_models()
    demo_3_routes()
    demo_4_cognition()
    demo_5_assignment()

    print("🎉 DEMO COMPLETE!")
    print("-" * 50)
    print("🚀 Next Steps:")
    print("   • Use the CLI: python cli.py --help")
    print("   • Full run: python cli.py run --out out")
    print("   • Compare cognition on/off: python cli.py compare --iterations 50")
    print()


if __name__ == "__main__":
    main()
