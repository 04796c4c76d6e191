"""
Iterative route-choice assignment.

Iteration 0 prices the network at free flow. Every iteration then lets each
driver packet decide (library hit or fresh choice), applies the en-route
events due in that work period, loads the chosen routes, blends volumes
(method of successive averages by default), updates travel times through the
volume-delay function and stores the realised route costs back into the
feature library. The loop stops once the average travel cost settles and no
scheduled event is still to fire, or when max_iterations is reached.
"""

from __future__ import annotations

import gc
import logging
import math
import time
from collections import defaultdict
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .choice import ChoiceSet
from .cognition import (
    DriverPacket, EnvironmentEvent, FeatureKey, FeatureLibrary, LookupStats,
    build_packets, decide, driver_class_of, perceive, resense,
)
from .config import SimulationConfig
from .costs import congested_travel_time, free_flow_times, price_edges, route_general_cost
from .demand import ODMatrix, check_od_zones
from .errors import ChoiceError, NetworkError
from .network import Network, Route
from .routing import RouteQuery, k_shortest_routes
from .rng import packet_stream, resense_stream

logger = logging.getLogger(__name__)

ODPair = Tuple[str, str]

CONVERGENCE_WINDOW = 3


@dataclass(frozen=True)
class NetworkState:
    """Edge volumes (veh/h) and travel times (s) after ``iteration`` blended loads."""

    iteration: int
    volumes: Mapping[str, float]
    travel_times: Mapping[str, float]
    incidents: Mapping[str, float] = field(default_factory=dict)

    @classmethod
    def free_flow(cls, network: Network) -> NetworkState:
        return cls(0, {edge_id: 0.0 for edge_id in network.edges}, free_flow_times(network))


@dataclass(frozen=True)
class IterationReport:
    iteration: int
    average_travel_cost: float
    cost_variance: float
    route_search_time: float
    cache_hit_rate: float
    converged: bool


@dataclass
class RouteFlows:
    """Demand per chosen route, in first-assignment order."""

    by_route: Dict[Route, float] = field(default_factory=dict)

    def add(self, route: Route, demand: float) -> None:
        self.by_route[route] = self.by_route.get(route, 0.0) + demand

    def edge_volumes(self) -> Dict[str, float]:
        volumes: Dict[str, float] = defaultdict(float)
        for route, demand in self.by_route.items():
            for edge_id in route.edge_ids:
                volumes[edge_id] += demand
        return dict(volumes)

    def od_totals(self) -> Dict[ODPair, float]:
        parts: Dict[ODPair, List[float]] = defaultdict(list)
        for route, demand in self.by_route.items():
            parts[(route.origin_zone, route.dest_zone)].append(demand)
        return {od: math.fsum(values) for od, values in parts.items()}


@dataclass
class AssignmentResult:
    reports: List[IterationReport]
    flows: RouteFlows
    library: FeatureLibrary
    state: NetworkState
    od_totals: List[Dict[ODPair, float]]

    @property
    def converged(self) -> bool:
        return bool(self.reports) and self.reports[-1].converged


class RouteSets:
    """Per-iteration route sets, enumerated on first request."""

    def __init__(self, network: Network, cost_map: Mapping[str, float], k: int):
        self._network = network
        self._cost_map = cost_map
        self._k = k
        self._routes: Dict[ODPair, List[Route]] = {}

    def __getitem__(self, od: ODPair) -> List[Route]:
        routes = self._routes.get(od)
        if routes is None:
            routes = k_shortest_routes(self._network, RouteQuery(od[0], od[1], self._k, self._cost_map))
            self._routes[od] = routes
        return routes

    def __len__(self) -> int:
        return len(self._routes)


class SearchClock:
    """Wall-clock seconds spent in decision passes.

    Each pass is timed as one block with garbage collection paused; time
    spent sampling on library misses is subtracted, leaving enumeration and
    retrieval.
    """

    def __init__(self):
        self.seconds = 0.0

    @contextmanager
    def timing(self) -> Iterator[None]:
        collecting = gc.isenabled()
        gc.disable()
        started = time.perf_counter()
        try:
            yield
        finally:
            self.seconds += time.perf_counter() - started
            if collecting:
                gc.enable()

    def search_time(self, stats: LookupStats) -> float:
        return max(self.seconds - stats.reasoning_seconds, 0.0)


class ClassPricing:
    """Edge costs per driver class over one travel-time snapshot."""

    def __init__(self, network: Network, config: SimulationConfig, travel_times: Mapping[str, float]):
        self._network = network
        self._config = config
        self._travel_times = travel_times
        self._costs: Dict[str, Dict[str, float]] = {}

    def edge_costs(self, driver_class: str) -> Dict[str, float]:
        weights = self._config.weights_for(driver_class)
        costs = self._costs.get(weights.driver_class)
        if costs is None:
            costs = price_edges(self._network, weights, self._travel_times)
            self._costs[weights.driver_class] = costs
        return costs

    def choice_set(self, key: FeatureKey, routes: Sequence[Route]) -> ChoiceSet:
        costs = self.edge_costs(driver_class_of(key))
        return ChoiceSet(tuple(routes), tuple(route_general_cost(route, costs) for route in routes))

    def route_cost(self, key: FeatureKey, route: Route) -> float:
        return route_general_cost(route, self.edge_costs(driver_class_of(key)))


def _incident_times(state: NetworkState, network: Network, incidents: Mapping[str, float]) -> Dict[str, float]:
    times = dict(state.travel_times)
    for edge_id, factor in incidents.items():
        if edge_id not in network.edges:
            raise NetworkError(f"incident on unknown edge '{edge_id}'")
        if factor != state.incidents.get(edge_id):
            times[edge_id] = state.travel_times[edge_id] / state.incidents.get(edge_id, 1.0) * factor
    return times


def assign_demand(packets: Sequence[DriverPacket], route_sets, pricing: ClassPricing,
                  library: Optional[FeatureLibrary], config: SimulationConfig,
                  stats: Optional[LookupStats] = None) -> Tuple[RouteFlows, Optional[FeatureLibrary]]:
    """Place each packet's demand on exactly one route (its retrieved or reasoned choice).

    ``route_sets`` maps (origin, dest) to the candidate routes. ``library=None``
    disables cognition, so every packet reasons afresh. A packet draws from
    the same stream in every iteration, so its choice only moves when the
    candidate costs do.
    """
    flows = RouteFlows()
    for packet in packets:
        decide(packet, library, _priced(packet, route_sets, pricing), config.choice,
               packet_stream(config.seed, packet.id), stats)
    for packet in packets:
        flows.add(packet.chosen_route, packet.demand)
    return flows, library


def _priced(packet: DriverPacket, route_sets, pricing: ClassPricing) -> Callable[[FeatureKey], ChoiceSet]:
    def candidates(key: FeatureKey) -> ChoiceSet:
        routes = route_sets[(packet.origin_zone, packet.dest_zone)]
        if not routes:
            raise ChoiceError(f"empty route set for {packet.origin_zone}->{packet.dest_zone}")
        return pricing.choice_set(key, routes)
    return candidates


def update_travel_times(network: Network, state: NetworkState, candidate: Mapping[str, float],
                        config: SimulationConfig) -> NetworkState:
    """Blend candidate edge volumes into ``state`` and recompute edge travel times.

    With successive averaging the n-th load moves volumes 1/n of the way to
    the candidate; link volume is the sum over the edges using that link.
    """
    step = state.iteration + 1
    volumes: Dict[str, float] = {}
    for edge_id in network.edges:
        target = candidate.get(edge_id, 0.0)
        if config.averaging == "successive":
            previous = state.volumes.get(edge_id, 0.0)
            volumes[edge_id] = previous + (target - previous) / step
        else:
            volumes[edge_id] = target

    link_volumes: Dict[str, float] = defaultdict(float)
    for edge_id, edge in network.edges.items():
        for link_id in edge.link_ids:
            link_volumes[link_id] += volumes[edge_id]

    travel_times = {}
    for edge_id, edge in network.edges.items():
        travel_time = math.fsum(
            congested_travel_time(network.links[link_id].free_flow_time, link_volumes[link_id],
                                  network.links[link_id].capacity, config.volume_delay)
            for link_id in edge.link_ids
        )
        travel_times[edge_id] = travel_time * state.incidents.get(edge_id, 1.0)
    return NetworkState(step, volumes, travel_times, dict(state.incidents))


def check_convergence(history: Sequence[float], epsilon: float) -> bool:
    """True when the last (up to three) relative changes are all below ``epsilon``."""
    if len(history) < 2:
        return False
    pairs = min(CONVERGENCE_WINDOW, len(history) - 1)
    for previous, current in zip(history[-pairs - 1:-1], history[-pairs:]):
        if previous == 0:
            if current != 0:
                return False
            continue
        if not abs(current - previous) / abs(previous) < epsilon:
            return False
    return True


def compute_metrics(iteration: int, costs: Sequence[float], demands: Sequence[float],
                    route_search_time: float, stats: LookupStats, converged: bool = False) -> IterationReport:
    """Demand-weighted mean and population variance of realised packet costs."""
    if len(costs) and float(np.sum(demands)) > 0:
        values = np.asarray(costs, dtype=float)
        weights = np.asarray(demands, dtype=float)
        mean = float(np.average(values, weights=weights))
        variance = float(np.average((values - mean) ** 2, weights=weights))
    else:
        mean = variance = 0.0
    return IterationReport(iteration, mean, variance, route_search_time, stats.hit_rate, converged)


def free_flow_lower_bound(network: Network, od: ODMatrix, config: SimulationConfig) -> float:
    """Demand-weighted mean of each packet's cheapest free-flow route cost."""
    od = od.scaled(config.demand_factor)
    packets = build_packets(od.entries(), config.packets_per_od)
    if not packets:
        return 0.0
    pricing = ClassPricing(network, config, free_flow_times(network))
    cheapest: Dict[Tuple[ODPair, str], float] = {}
    costs = []
    for packet in packets:
        driver_class = config.weights_for(driver_class_of(perceive(packet))).driver_class
        slot = ((packet.origin_zone, packet.dest_zone), driver_class)
        if slot not in cheapest:
            edge_costs = pricing.edge_costs(driver_class)
            best = k_shortest_routes(network, RouteQuery(packet.origin_zone, packet.dest_zone, 1, edge_costs))[0]
            cheapest[slot] = route_general_cost(best, edge_costs)
        costs.append(cheapest[slot])
    return float(np.average(costs, weights=[packet.demand for packet in packets]))


Observer = Callable[[IterationReport, FeatureLibrary], None]


def run_assignment(network: Network, od: ODMatrix, config: SimulationConfig,
                   library: Optional[FeatureLibrary] = None,
                   observer: Optional[Observer] = None) -> AssignmentResult:
    check_od_zones(od, network)
    od = od.scaled(config.demand_factor)
    packets = build_packets(od.entries(), config.packets_per_od)
    library = library if library is not None else FeatureLibrary()
    memory = library if config.cognition else None
    state = NetworkState.free_flow(network)
    logger.info("assignment start: %d packets, mode=%s, cognition=%s, model=%s",
                len(packets), config.mode, "on" if config.cognition else "off", config.choice.model)

    if not packets:
        report = IterationReport(0, 0.0, 0.0, 0.0, 0.0, True)
        if observer:
            observer(report, library)
        return AssignmentResult([report], RouteFlows(), library, state, [{}])

    for event in config.events:
        if event.iteration(config.work_period) >= config.max_iterations:
            logger.warning("event at %gs is due in iteration %d, past max_iterations %d; it will not fire",
                           event.at, event.iteration(config.work_period), config.max_iterations)

    reports: List[IterationReport] = []
    totals: List[Dict[ODPair, float]] = []
    history: List[float] = []
    flows = RouteFlows()
    reference = config.weights_for(config.reference_class)
    held = False

    for iteration in range(config.max_iterations):
        stats = LookupStats()
        clock = SearchClock()
        pricing = ClassPricing(network, config, state.travel_times)
        route_sets = RouteSets(network, price_edges(network, reference, state.travel_times), config.k_routes)

        with clock.timing():
            flows, _ = assign_demand(packets, route_sets, pricing, memory, config, stats)

        due = [event for event in config.events if event.iteration(config.work_period) == iteration]
        if due:
            state, pricing, route_sets = _fire_events(network, state, due, config, route_sets)
            with clock.timing():
                for order, event in enumerate(due, start=1):
                    for packet in packets:
                        if event.affects(packet):
                            resense(packet, event, memory, _priced(packet, route_sets, pricing), config.choice,
                                    resense_stream(config.seed, iteration, packet.id, order), stats)
            flows = RouteFlows()
            for packet in packets:
                flows.add(packet.chosen_route, packet.demand)

        search_time = clock.search_time(stats)
        state = update_travel_times(network, state, flows.edge_volumes(), config)
        realized = ClassPricing(network, config, state.travel_times)

        costs = []
        for packet in packets:
            key = perceive(packet)
            cost = realized.route_cost(key, packet.chosen_route)
            costs.append(cost)
            if memory is not None:
                memory.evaluate_and_store(key, packet.chosen_route, cost)

        report = compute_metrics(iteration, costs, [p.demand for p in packets], search_time, stats)
        history.append(report.average_travel_cost)
        converged = check_convergence(history, config.epsilon)
        report = IterationReport(report.iteration, report.average_travel_cost, report.cost_variance,
                                 report.route_search_time, report.cache_hit_rate, converged)
        reports.append(report)
        totals.append(flows.od_totals())
        logger.info("iteration %d: avg cost %.6g, variance %.6g, hit rate %.3f, search %.2f ms%s",
                    iteration, report.average_travel_cost, report.cost_variance, report.cache_hit_rate,
                    report.route_search_time * 1000, ", converged" if converged else "")
        if observer:
            observer(report, library)
        if converged and config.stop_on_convergence:
            pending = [due_in for due_in in (event.iteration(config.work_period) for event in config.events)
                       if iteration < due_in < config.max_iterations]
            if not pending:
                break
            if not held:
                logger.info("converged at iteration %d; running on to events due in iteration %d",
                            iteration, max(pending))
                held = True

    if not reports[-1].converged:
        logger.warning("no convergence after %d iterations (epsilon %g)", len(reports), config.epsilon)
    return AssignmentResult(reports, flows, library, state, totals)


def _fire_events(network: Network, state: NetworkState, events: Sequence[EnvironmentEvent],
                 config: SimulationConfig, route_sets: RouteSets) -> Tuple[NetworkState, ClassPricing, RouteSets]:
    incidents = dict(state.incidents)
    for event in events:
        for edge_id in event.incident_edges:
            incidents[edge_id] = event.incident_factor
    if incidents == dict(state.incidents):
        return state, ClassPricing(network, config, state.travel_times), route_sets
    travel_times = _incident_times(state, network, incidents)
    state = NetworkState(state.iteration, state.volumes, travel_times, incidents)
    logger.info("incidents on %s", ", ".join(sorted(incidents)))
    reference = config.weights_for(config.reference_class)
    fresh = RouteSets(network, price_edges(network, reference, travel_times), config.k_routes)
    return state, ClassPricing(network, config, travel_times), fresh
