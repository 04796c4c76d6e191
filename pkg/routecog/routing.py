"""
Candidate route sets.

k_shortest_routes runs Yen's loopless k-shortest-paths over a Dijkstra on
the edge graph. Enumeration runs on past the k-th route while candidates tie
its cost; the routes are then sorted by (cost, edge-id sequence) and cut to k,
so equal-cost routes always come back in lexicographic order and every result
is a pure function of its inputs. brute_force_routes is the exhaustive
oracle used by the tests.
"""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass
from typing import AbstractSet, List, Mapping, Optional, Set, Tuple

from .errors import CostError, EnumerationLimitError, InputError, NoRouteError
from .network import Network, Route

logger = logging.getLogger(__name__)

PARTIAL_PATH_LIMIT = 1_000_000

Path = Tuple[str, ...]


@dataclass(frozen=True)
class RouteQuery:
    origin_zone: str
    dest_zone: str
    k: int
    cost_map: Mapping[str, float]

    def __post_init__(self):
        if self.origin_zone == self.dest_zone:
            raise InputError(f"origin and destination must differ, got {self.origin_zone} twice")
        if isinstance(self.k, bool) or not isinstance(self.k, int) or self.k < 1:
            raise InputError(f"k must be an integer >= 1, got {self.k!r}")


def _check_costs(network: Network, cost_map: Mapping[str, float]) -> None:
    for edge_id in network.edges:
        if edge_id not in cost_map:
            raise CostError(f"no cost for edge '{edge_id}'")
        cost = cost_map[edge_id]
        if not (math.isfinite(cost) and cost >= 0):
            raise CostError(f"cost of edge '{edge_id}' must be finite and >= 0, got {cost}")


def _shortest_path(network: Network, cost_map: Mapping[str, float], source: str, target: str,
                   banned_nodes: AbstractSet[str] = frozenset(),
                   banned_edges: AbstractSet[str] = frozenset()) -> Optional[Path]:
    heap: List[Tuple[float, Path, str]] = [(0.0, (), source)]
    settled: Set[str] = set()
    while heap:
        cost, path, node = heapq.heappop(heap)
        if node in settled:
            continue
        if node == target:
            return path
        settled.add(node)
        for edge_id, head in network.successors.get(node, ()):
            if head in settled or head in banned_nodes or edge_id in banned_edges:
                continue
            heapq.heappush(heap, (cost + cost_map[edge_id], path + (edge_id,), head))
    return None


def _path_cost(path: Path, cost_map: Mapping[str, float]) -> float:
    return math.fsum(cost_map[edge_id] for edge_id in path)


def _path_nodes(network: Network, source: str, path: Path) -> List[str]:
    nodes = [source]
    for edge_id in path:
        nodes.append(network.edge_endpoints[edge_id][1])
    return nodes


def k_shortest_routes(network: Network, query: RouteQuery) -> List[Route]:
    """Up to ``query.k`` loopless routes in non-decreasing general cost."""
    _check_costs(network, query.cost_map)
    costs = query.cost_map
    source = network.centroid(query.origin_zone)
    target = network.centroid(query.dest_zone)

    first = _shortest_path(network, costs, source, target)
    if first is None:
        raise NoRouteError(query.origin_zone, query.dest_zone)

    found: List[Path] = [first]
    seen: Set[Path] = {first}
    candidates: List[Tuple[float, Path]] = []

    while True:
        previous = found[-1]
        nodes = _path_nodes(network, source, previous)
        for i in range(len(previous)):
            root = previous[:i]
            banned_edges = {path[i] for path in found if len(path) > i and path[:i] == root}
            spur = _shortest_path(network, costs, nodes[i], target,
                                  banned_nodes=frozenset(nodes[:i]), banned_edges=banned_edges)
            if spur is None:
                continue
            path = root + spur
            if path not in seen:
                seen.add(path)
                heapq.heappush(candidates, (_path_cost(path, costs), path))
        if not candidates:
            break
        if len(found) >= query.k and candidates[0][0] > _path_cost(found[query.k - 1], costs):
            break
        found.append(heapq.heappop(candidates)[1])

    found.sort(key=lambda path: (_path_cost(path, costs), path))
    del found[query.k:]

    logger.debug("%s->%s: %d of %d routes", query.origin_zone, query.dest_zone, len(found), query.k)
    return [Route(query.origin_zone, query.dest_zone, path) for path in found]


def brute_force_routes(network: Network, origin: str, dest: str,
                       limit: int = PARTIAL_PATH_LIMIT) -> List[Route]:
    """Every loopless route from ``origin`` to ``dest``, in edge-id order."""
    source = network.centroid(origin)
    target = network.centroid(dest)
    routes: List[Route] = []
    partial = 0
    stack: List[Tuple[str, Path, frozenset]] = [(source, (), frozenset((source,)))]
    while stack:
        node, path, visited = stack.pop()
        partial += 1
        if partial > limit:
            raise EnumerationLimitError(f"more than {limit} partial paths from {origin} to {dest}")
        if node == target:
            if path:
                routes.append(Route(origin, dest, path))
            continue
        for edge_id, head in network.successors.get(node, ()):
            if head not in visited:
                stack.append((head, path + (edge_id,), visited | {head}))
    routes.sort(key=lambda route: route.edge_ids)
    return routes
