"""
Road network model: nodes, links, edges, zones and routes.

A network is read from a JSON document with four top-level arrays
(``nodes``, ``links``, ``edges``, ``zones``). Links are directed road
segments carrying the physical and financial attributes; edges are the
routing units, each an ordered chain of links; zones attach to the graph
through their centroid node.

The bundled fixture is a 12-zone abstract city. Inner nodes N13-N24 form a
3 x 4 junction grid; rows are Express1, Major1 and Express2, columns are
Minor1, Express3, Slip1 and Minor2. Edge nodes N1-N12 sit on the outer
carriageways and every zone centroid (C1-C12) sits on a corridor between two
junctions, so each zone can be left in two directions. Fixture link ids read
``<Corridor>/<from>-<to>`` and edge ids ``<Corridor>:<from>-<to>``.
"""

from __future__ import annotations

import json
import logging
import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property, lru_cache
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Mapping, Tuple, Union

import networkx as nx

from .errors import ConnectivityError, NetworkError

logger = logging.getLogger(__name__)

NODE_KINDS = ("edge-node", "inner-node", "zone-centroid")
ROAD_CLASSES = ("express", "major", "minor", "slip")

NODE_FIELDS = ("id", "kind", "label")
LINK_FIELDS = (
    "id", "from_node", "to_node", "length", "lanes", "free_flow_speed", "capacity",
    "cost_rate", "supplement1", "supplement2", "road_quality", "road_class",
)
EDGE_FIELDS = ("id", "link_ids")
ZONE_FIELDS = ("id", "centroid_node", "name")
SECTIONS = (("nodes", NODE_FIELDS), ("links", LINK_FIELDS), ("edges", EDGE_FIELDS), ("zones", ZONE_FIELDS))

_STRING_FIELDS = {"id", "kind", "label", "from_node", "to_node", "road_class", "centroid_node", "name"}
_REAL_FIELDS = {"length", "free_flow_speed", "capacity", "cost_rate", "supplement1", "supplement2", "road_quality"}


@dataclass(frozen=True)
class Node:
    id: str
    kind: str
    label: str = ""


@dataclass(frozen=True)
class Link:
    id: str
    from_node: str
    to_node: str
    length: float
    lanes: int
    free_flow_speed: float
    capacity: float
    cost_rate: float = 0.0
    supplement1: float = 0.0
    supplement2: float = 0.0
    road_quality: float = 0.0
    road_class: str = "minor"

    @property
    def free_flow_time(self) -> float:
        """Seconds to traverse the link at free-flow speed."""
        return self.length / self.free_flow_speed


@dataclass(frozen=True)
class Edge:
    id: str
    link_ids: Tuple[str, ...]


@dataclass(frozen=True)
class Zone:
    id: str
    centroid_node: str
    name: str = ""


@dataclass(frozen=True)
class Route:
    """Ordered edge sequence from an origin zone centroid to a destination centroid."""

    origin_zone: str
    dest_zone: str
    edge_ids: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "edge_ids", tuple(self.edge_ids))
        if not self.edge_ids:
            raise NetworkError(f"route {self.origin_zone}->{self.dest_zone} has no edges")

    def __str__(self) -> str:
        return " > ".join(self.edge_ids)


@dataclass(frozen=True)
class Diagnostic:
    entity: str
    rule: str
    message: str

    def __str__(self) -> str:
        return f"{self.entity}: {self.message} [{self.rule}]"


@dataclass(frozen=True)
class Network:
    """Immutable routing graph. Collections keep document order."""

    nodes: Mapping[str, Node]
    links: Mapping[str, Link]
    edges: Mapping[str, Edge]
    zones: Mapping[str, Zone]

    @property
    def zone_ids(self) -> Tuple[str, ...]:
        return tuple(self.zones)

    @cached_property
    def edge_endpoints(self) -> Dict[str, Tuple[str, str]]:
        """edge id -> (first from_node, last to_node) for edges whose links resolve."""
        endpoints = {}
        for edge in self.edges.values():
            if edge.link_ids and all(link_id in self.links for link_id in edge.link_ids):
                first = self.links[edge.link_ids[0]]
                last = self.links[edge.link_ids[-1]]
                endpoints[edge.id] = (first.from_node, last.to_node)
        return endpoints

    @cached_property
    def adjacency(self) -> Dict[str, Tuple[str, ...]]:
        """node id -> outgoing edge ids, sorted."""
        outgoing: Dict[str, List[str]] = {node_id: [] for node_id in self.nodes}
        for edge_id, (tail, _) in self.edge_endpoints.items():
            outgoing.setdefault(tail, []).append(edge_id)
        return {node_id: tuple(sorted(edge_ids)) for node_id, edge_ids in outgoing.items()}

    @cached_property
    def successors(self) -> Dict[str, Tuple[Tuple[str, str], ...]]:
        """node id -> ((edge id, head node), ...) in edge-id order."""
        return {
            node_id: tuple((edge_id, self.edge_endpoints[edge_id][1]) for edge_id in edge_ids)
            for node_id, edge_ids in self.adjacency.items()
        }

    def centroid(self, zone_id: str) -> str:
        try:
            return self.zones[zone_id].centroid_node
        except KeyError:
            raise NetworkError(f"unknown zone '{zone_id}'") from None

    def route_nodes(self, route: Route) -> Tuple[str, ...]:
        nodes = [self.centroid(route.origin_zone)]
        for edge_id in route.edge_ids:
            nodes.append(self.edge_endpoints[edge_id][1])
        return tuple(nodes)

    def digraph(self) -> nx.DiGraph:
        """Node-level view of the edge graph (one arc per node pair)."""
        graph = nx.DiGraph()
        graph.add_nodes_from(self.nodes)
        for edge_id, (tail, head) in self.edge_endpoints.items():
            graph.add_edge(tail, head, edge_id=edge_id)
        return graph


NetworkSource = Union[str, bytes, Mapping[str, Any]]


def parse_network(source: NetworkSource) -> Network:
    """Schema-check a network document and index it, without checking invariants."""
    return _assemble(_parse_document(source))


def load_network(source: NetworkSource) -> Network:
    """Parse and validate a network document (JSON text or parsed mapping)."""
    network = parse_network(source)
    _check_references(network)
    diagnostics = validate_network(network)
    if diagnostics:
        first = diagnostics[0]
        if first.rule == "zone-connectivity":
            origin, dest = first.entity.split("->")
            raise ConnectivityError(origin, dest)
        extra = f" (+{len(diagnostics) - 1} more)" if len(diagnostics) > 1 else ""
        raise NetworkError(f"{diagnostics[0]}{extra}")
    logger.debug("loaded network: %d nodes, %d links, %d edges, %d zones",
                 len(network.nodes), len(network.links), len(network.edges), len(network.zones))
    return network


def read_network(path: Union[str, Path]) -> Network:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise NetworkError(f"cannot read network file {path}: {e.strerror}") from e
    return load_network(text)


def serialize_network(network: Network) -> str:
    """Canonical JSON: fixed key order, document entry order, trailing newline."""
    document = {
        "nodes": [{"id": n.id, "kind": n.kind, "label": n.label} for n in network.nodes.values()],
        "links": [
            {
                "id": link.id,
                "from_node": link.from_node,
                "to_node": link.to_node,
                "length": float(link.length),
                "lanes": int(link.lanes),
                "free_flow_speed": float(link.free_flow_speed),
                "capacity": float(link.capacity),
                "cost_rate": float(link.cost_rate),
                "supplement1": float(link.supplement1),
                "supplement2": float(link.supplement2),
                "road_quality": float(link.road_quality),
                "road_class": link.road_class,
            }
            for link in network.links.values()
        ],
        "edges": [{"id": e.id, "link_ids": list(e.link_ids)} for e in network.edges.values()],
        "zones": [{"id": z.id, "centroid_node": z.centroid_node, "name": z.name} for z in network.zones.values()],
    }
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


def validate_network(network: Network) -> List[Diagnostic]:
    """Check every network invariant; an empty list means the network is valid."""
    found: List[Diagnostic] = []

    def report(entity: str, rule: str, message: str) -> None:
        found.append(Diagnostic(entity, rule, message))

    for node in network.nodes.values():
        if node.kind not in NODE_KINDS:
            report(node.id, "node-kind", f"kind '{node.kind}' is not one of {', '.join(NODE_KINDS)}")

    for link in network.links.values():
        for end in (link.from_node, link.to_node):
            if end not in network.nodes:
                report(link.id, "link-endpoint", f"dangling reference to node '{end}'")
        if link.from_node == link.to_node:
            report(link.id, "link-loop", "from_node equals to_node")
        if not (math.isfinite(link.length) and link.length > 0):
            report(link.id, "link-length", f"length must be finite and > 0, got {link.length}")
        if link.lanes < 1:
            report(link.id, "link-lanes", f"lanes must be >= 1, got {link.lanes}")
        if not (math.isfinite(link.free_flow_speed) and link.free_flow_speed > 0):
            report(link.id, "link-speed", f"free_flow_speed must be finite and > 0, got {link.free_flow_speed}")
        if not (math.isfinite(link.capacity) and link.capacity > 0):
            report(link.id, "link-capacity", f"capacity must be finite and > 0, got {link.capacity}")
        for name in ("cost_rate", "supplement1", "supplement2", "road_quality"):
            if not (math.isfinite(getattr(link, name)) and getattr(link, name) >= 0):
                report(link.id, "link-cost", f"{name} must be finite and >= 0, got {getattr(link, name)}")
        if link.road_class not in ROAD_CLASSES:
            report(link.id, "link-class", f"road_class '{link.road_class}' is not one of {', '.join(ROAD_CLASSES)}")

    for edge in network.edges.values():
        if not edge.link_ids:
            report(edge.id, "edge-empty", "edge has no links")
            continue
        missing = [link_id for link_id in edge.link_ids if link_id not in network.links]
        if missing:
            report(edge.id, "edge-dangling", f"dangling reference to link '{missing[0]}'")
            continue
        repeated = [link_id for link_id, n in Counter(edge.link_ids).items() if n > 1]
        if repeated:
            report(edge.id, "edge-repeat", f"link '{repeated[0]}' appears more than once")
        for before, after in zip(edge.link_ids, edge.link_ids[1:]):
            if network.links[before].to_node != network.links[after].from_node:
                report(edge.id, "edge-connected", f"links '{before}' and '{after}' are not connected")
                break

    referenced = Counter(zone.centroid_node for zone in network.zones.values())
    for zone in network.zones.values():
        node = network.nodes.get(zone.centroid_node)
        if node is None:
            report(zone.id, "zone-centroid", f"dangling reference to centroid node '{zone.centroid_node}'")
        elif node.kind != "zone-centroid":
            report(zone.id, "zone-centroid", f"centroid node '{node.id}' has kind '{node.kind}'")
    for node in network.nodes.values():
        if node.kind == "zone-centroid" and referenced[node.id] != 1:
            report(node.id, "centroid-unique", f"referenced by {referenced[node.id]} zones, expected 1")

    if len(network.zones) < 2:
        report("zones", "zone-count", "at least 2 zones required")

    if not any(d.rule == "zone-centroid" for d in found):
        found.extend(_connectivity(network))
    return found


def _connectivity(network: Network) -> List[Diagnostic]:
    graph = network.digraph()
    diagnostics = []
    for origin in network.zones.values():
        reachable = nx.descendants(graph, origin.centroid_node)
        for dest in network.zones.values():
            if dest.id != origin.id and dest.centroid_node not in reachable:
                diagnostics.append(Diagnostic(
                    f"{origin.id}->{dest.id}", "zone-connectivity",
                    f"zone {dest.id} is unreachable from zone {origin.id}",
                ))
    return diagnostics


def check_route(network: Network, route: Route) -> None:
    """Raise NetworkError unless ``route`` is a connected loopless path between its zones."""
    label = f"route {route.origin_zone}->{route.dest_zone}"
    at = network.centroid(route.origin_zone)
    target = network.centroid(route.dest_zone)
    visited = {at}
    for edge_id in route.edge_ids:
        if edge_id not in network.edge_endpoints:
            raise NetworkError(f"{label}: unknown edge '{edge_id}'")
        tail, head = network.edge_endpoints[edge_id]
        if tail != at:
            raise NetworkError(f"{label}: edge '{edge_id}' does not start at node '{at}'")
        if head in visited:
            raise NetworkError(f"{label}: node '{head}' visited twice")
        visited.add(head)
        at = head
    if at != target:
        raise NetworkError(f"{label}: ends at node '{at}', expected '{target}'")


def corridor_inventory(network: Network) -> Dict[str, int]:
    """Number of distinct named corridors per road class (link ids ``<Corridor>/...``)."""
    corridors: Dict[str, set] = {road_class: set() for road_class in ROAD_CLASSES}
    for link in network.links.values():
        corridors.setdefault(link.road_class, set()).add(link.id.split("/", 1)[0])
    return {road_class: len(names) for road_class, names in corridors.items()}


@lru_cache(maxsize=1)
def fixture_network() -> Network:
    """The bundled 12-zone fixture network."""
    return load_network(fixture_network_text())


def fixture_network_text() -> str:
    return (resources.files("routecog") / "data" / "fixture_network.json").read_text(encoding="utf-8")


# ─────────────────────────────────────────────────────────────────────────────
# Document parsing
# ─────────────────────────────────────────────────────────────────────────────

def _parse_document(source: NetworkSource) -> Mapping[str, Any]:
    if isinstance(source, (str, bytes)):
        try:
            document = json.loads(source)
        except json.JSONDecodeError as e:
            raise NetworkError(f"network document is not valid JSON: {e}") from e
    else:
        document = source
    if not isinstance(document, Mapping):
        raise NetworkError("network document must be a JSON object")

    expected = [name for name, _ in SECTIONS]
    for key in document:
        if key not in expected:
            raise NetworkError(f"unknown field '{key}' at top level")
    for name, fields in SECTIONS:
        if name not in document:
            raise NetworkError(f"missing field '{name}' at top level")
        entries = document[name]
        if not isinstance(entries, list):
            raise NetworkError(f"field '{name}' must be an array")
        for index, entry in enumerate(entries):
            _check_entry(f"{name}[{index}]", entry, fields)
    return document


def _check_entry(where: str, entry: Any, fields: Tuple[str, ...]) -> None:
    if not isinstance(entry, Mapping):
        raise NetworkError(f"{where} must be an object")
    for key in entry:
        if key not in fields:
            raise NetworkError(f"{where}: unknown field '{key}'")
    for key in fields:
        if key not in entry:
            raise NetworkError(f"{where}: missing field '{key}'")
        value = entry[key]
        if key in _STRING_FIELDS and not isinstance(value, str):
            raise NetworkError(f"{where}.{key} must be a string")
        if key in _REAL_FIELDS and (isinstance(value, bool) or not isinstance(value, (int, float))):
            raise NetworkError(f"{where}.{key} must be a number")
        if key == "lanes" and (isinstance(value, bool) or not isinstance(value, int)):
            raise NetworkError(f"{where}.lanes must be an integer")
        if key == "link_ids" and not (isinstance(value, list) and all(isinstance(v, str) for v in value)):
            raise NetworkError(f"{where}.link_ids must be an array of strings")


def _index(name: str, items: List[Any]) -> Dict[str, Any]:
    indexed: Dict[str, Any] = {}
    for item in items:
        if item.id in indexed:
            raise NetworkError(f"duplicate id '{item.id}' in {name}")
        indexed[item.id] = item
    return indexed


def _assemble(document: Mapping[str, Any]) -> Network:
    nodes = _index("nodes", [Node(**entry) for entry in document["nodes"]])
    links = _index("links", [
        Link(**{**entry, **{key: float(entry[key]) for key in _REAL_FIELDS}})
        for entry in document["links"]
    ])
    edges = _index("edges", [Edge(id=e["id"], link_ids=tuple(e["link_ids"])) for e in document["edges"]])
    zones = _index("zones", [Zone(**entry) for entry in document["zones"]])
    return Network(nodes=nodes, links=links, edges=edges, zones=zones)


def _check_references(network: Network) -> None:
    nodes, links, zones = network.nodes, network.links, network.zones
    if len(zones) < 2:
        raise NetworkError("at least 2 zones required")
    for link in links.values():
        for end in (link.from_node, link.to_node):
            if end not in nodes:
                raise NetworkError(f"link '{link.id}' references missing node '{end}' (dangling reference)")
    for edge in network.edges.values():
        for link_id in edge.link_ids:
            if link_id not in links:
                raise NetworkError(f"edge '{edge.id}' references missing link '{link_id}' (dangling reference)")
    for zone in zones.values():
        if zone.centroid_node not in nodes:
            raise NetworkError(f"zone '{zone.id}' references missing node '{zone.centroid_node}' (dangling reference)")
