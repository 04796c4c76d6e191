"""
General cost pricing.

Edge general cost is a weighted sum of travel time, distance, financial link
cost and road quality, plus the unweighted per-link supplement2 charges.
Route cost is the sum of its edge costs. Congested travel times come from a
BPR-form volume-delay function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Mapping, Optional

from .errors import CostError
from .network import Edge, Link, Network, Route


@dataclass(frozen=True)
class CostWeights:
    alpha: float
    beta: float
    gamma: float
    delta: float
    driver_class: str = "default"

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise CostError(f"weight {name} must be finite and >= 0, got {value} ({self.driver_class})")
        if not any((self.alpha, self.beta, self.gamma, self.delta)):
            raise CostError(f"at least one weight must be > 0 ({self.driver_class})")


@dataclass(frozen=True)
class EdgeState:
    edge_id: str
    travel_time: float
    volume: float = 0.0

    def __post_init__(self):
        if not self.travel_time > 0:
            raise CostError(f"travel time of edge '{self.edge_id}' must be > 0, got {self.travel_time}")
        if not self.volume >= 0:
            raise CostError(f"volume of edge '{self.edge_id}' must be >= 0, got {self.volume}")


@dataclass(frozen=True)
class VolumeDelayParams:
    a: float = 0.15
    b: float = 4.0

    def __post_init__(self):
        if not self.a >= 0:
            raise CostError(f"volume-delay a must be >= 0, got {self.a}")
        if not self.b >= 1:
            raise CostError(f"volume-delay b must be >= 1, got {self.b}")


def link_financial_cost(link: Link) -> float:
    return link.length * link.cost_rate + link.supplement1


def edge_free_flow_time(network: Network, edge_id: str) -> float:
    return math.fsum(network.links[link_id].free_flow_time for link_id in network.edges[edge_id].link_ids)


def edge_general_cost(edge: Edge, state: EdgeState, weights: CostWeights, network: Network) -> float:
    if state.edge_id != edge.id:
        raise CostError(f"state for edge '{state.edge_id}' used to price edge '{edge.id}'")
    links = [network.links[link_id] for link_id in edge.link_ids]
    distance = math.fsum(link.length for link in links)
    financial = math.fsum(link_financial_cost(link) for link in links)
    quality = math.fsum(link.road_quality for link in links)
    supplement2 = math.fsum(link.supplement2 for link in links)
    return (weights.alpha * state.travel_time
            + weights.beta * distance
            + weights.gamma * financial
            + weights.delta * quality
            + supplement2)


def route_general_cost(route: Route, edge_costs: Mapping[str, float]) -> float:
    try:
        return math.fsum(edge_costs[edge_id] for edge_id in route.edge_ids)
    except KeyError as e:
        raise CostError(f"no cost for edge '{e.args[0]}'") from None


def congested_travel_time(free_flow_time: float, volume: float, capacity: float,
                          params: VolumeDelayParams = VolumeDelayParams()) -> float:
    """free_flow_time * (1 + a * (volume / capacity) ** b)"""
    if not free_flow_time > 0:
        raise CostError(f"free-flow time must be > 0, got {free_flow_time}")
    if not capacity > 0:
        raise CostError(f"capacity must be > 0, got {capacity}")
    if not volume >= 0:
        raise CostError(f"volume must be >= 0, got {volume}")
    return free_flow_time * (1.0 + params.a * (volume / capacity) ** params.b)


def free_flow_times(network: Network) -> Dict[str, float]:
    return {edge_id: edge_free_flow_time(network, edge_id) for edge_id in network.edges}


def price_edges(network: Network, weights: CostWeights,
                travel_times: Optional[Mapping[str, float]] = None,
                volumes: Optional[Mapping[str, float]] = None) -> Dict[str, float]:
    """General cost of every edge; missing travel times fall back to free flow."""
    costs = {}
    for edge_id, edge in network.edges.items():
        if travel_times is not None and edge_id in travel_times:
            travel_time = travel_times[edge_id]
        else:
            travel_time = edge_free_flow_time(network, edge_id)
        volume = volumes.get(edge_id, 0.0) if volumes is not None else 0.0
        costs[edge_id] = edge_general_cost(edge, EdgeState(edge_id, travel_time, volume), weights, network)
    return costs
