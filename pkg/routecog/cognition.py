"""
Driver behaviour cognition.

Each driver packet perceives a feature key from its own attributes, its trip
and the environment, retrieves a remembered route from the feature library
and reasons over the priced candidate set only on a miss. After the trip the
realised cost is evaluated and the library keeps the better route per key.
En-route events change attributes or the environment; affected packets
re-sense and may pick a new route.
"""

from __future__ import annotations

import json
import logging
import math
import time
from dataclasses import dataclass, replace
from typing import Any, Callable, Dict, Iterator, List, Mapping, Optional, Tuple, Union

from .choice import ChoiceParams, ChoiceSet, choice_probabilities, sample_route
from .errors import ChoiceError, ConfigError, InputError, LibraryError, NetworkError
from .network import Network, Route, check_route
from .rng import SeededStream

logger = logging.getLogger(__name__)

AGE_BANDS = ("young", "middle", "senior")
GENDERS = ("female", "male")
EXPERIENCE_BANDS = ("novice", "experienced")
URGENCY_LEVELS = ("low", "high")
PHYSIOLOGICAL_STATES = ("normal", "fatigued")
WEATHER = ("clear", "rain")
ROAD_CONDITIONS = ("normal", "incident")

KEY_SEPARATOR = "|"


def _require(value: str, allowed: Tuple[str, ...], name: str) -> None:
    if value not in allowed:
        raise InputError(f"{name} must be one of {', '.join(allowed)}, got '{value}'")


@dataclass(frozen=True)
class StaticAttributes:
    age_band: str
    gender: str
    experience_band: str

    def __post_init__(self):
        _require(self.age_band, AGE_BANDS, "age_band")
        _require(self.gender, GENDERS, "gender")
        _require(self.experience_band, EXPERIENCE_BANDS, "experience_band")


@dataclass(frozen=True)
class TemporaryAttributes:
    dest_zone: str
    urgency: str = "low"
    physiological: str = "normal"

    def __post_init__(self):
        if not self.dest_zone:
            raise InputError("dest_zone must be set")
        _require(self.urgency, URGENCY_LEVELS, "urgency")
        _require(self.physiological, PHYSIOLOGICAL_STATES, "physiological")


@dataclass(frozen=True)
class EnvironmentState:
    weather: str = "clear"
    road_condition: str = "normal"

    def __post_init__(self):
        _require(self.weather, WEATHER, "weather")
        _require(self.road_condition, ROAD_CONDITIONS, "road_condition")


@dataclass(frozen=True)
class FeatureKey:
    origin_zone: str
    static: StaticAttributes
    temporary: TemporaryAttributes
    environment: EnvironmentState

    @property
    def dest_zone(self) -> str:
        return self.temporary.dest_zone

    def canonical(self) -> str:
        """Z1|young|female|novice|Z11|low|normal|clear|normal"""
        return KEY_SEPARATOR.join((
            self.origin_zone,
            self.static.age_band, self.static.gender, self.static.experience_band,
            self.temporary.dest_zone, self.temporary.urgency, self.temporary.physiological,
            self.environment.weather, self.environment.road_condition,
        ))

    @classmethod
    def parse(cls, text: str) -> FeatureKey:
        parts = text.split(KEY_SEPARATOR)
        if len(parts) != 9:
            raise LibraryError(f"feature key '{text}' must have 9 fields, got {len(parts)}")
        try:
            return cls(
                origin_zone=parts[0],
                static=StaticAttributes(*parts[1:4]),
                temporary=TemporaryAttributes(*parts[4:7]),
                environment=EnvironmentState(*parts[7:9]),
            )
        except InputError as e:
            raise LibraryError(f"feature key '{text}': {e}") from e

    def __str__(self) -> str:
        return self.canonical()


def driver_class_of(key: FeatureKey) -> str:
    """Weight class of a key: urgent trips first, otherwise the experience band."""
    if key.temporary.urgency == "high":
        return "urgent"
    return key.static.experience_band


@dataclass
class DriverPacket:
    """A block of drivers with one feature set, travelling one OD pair."""

    id: int
    origin_zone: str
    static: StaticAttributes
    temporary: TemporaryAttributes
    environment: EnvironmentState
    demand: float
    chosen_route: Optional[Route] = None

    def __post_init__(self):
        if not (math.isfinite(self.demand) and self.demand > 0):
            raise InputError(f"packet {self.id}: demand must be > 0, got {self.demand}")

    @property
    def dest_zone(self) -> str:
        return self.temporary.dest_zone


@dataclass
class LibraryEntry:
    route: Route
    score: float
    hits: int = 0


@dataclass
class LookupStats:
    """Library lookups in one iteration, plus the time spent sampling on misses."""

    lookups: int = 0
    hits: int = 0
    reasoning_seconds: float = 0.0

    @property
    def hit_rate(self) -> float:
        return self.hits / self.lookups if self.lookups else 0.0


def perceive(packet: DriverPacket) -> FeatureKey:
    return FeatureKey(packet.origin_zone, packet.static, packet.temporary, packet.environment)


class FeatureLibrary:
    """Feature key -> remembered route and its best realised cost."""

    def __init__(self):
        self._entries: Dict[FeatureKey, LibraryEntry] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key: FeatureKey) -> bool:
        return key in self._entries

    def __iter__(self) -> Iterator[FeatureKey]:
        return iter(self._entries)

    def peek(self, key: FeatureKey) -> Optional[LibraryEntry]:
        """Lookup without counting a hit."""
        return self._entries.get(key)

    def retrieve(self, key: FeatureKey, stats: Optional[LookupStats] = None) -> Optional[LibraryEntry]:
        entry = self._entries.get(key)
        if entry is not None:
            entry.hits += 1
        if stats is not None:
            stats.lookups += 1
            if entry is not None:
                stats.hits += 1
        return entry

    def evaluate_and_store(self, key: FeatureKey, route: Route, realized_cost: float) -> FeatureLibrary:
        """Insert, or replace only when ``realized_cost`` is strictly lower."""
        if not (math.isfinite(realized_cost) and realized_cost > 0):
            raise LibraryError(f"realized cost for {key} must be finite and > 0, got {realized_cost}")
        if (route.origin_zone, route.dest_zone) != (key.origin_zone, key.dest_zone):
            raise LibraryError(f"route {route.origin_zone}->{route.dest_zone} does not match key {key}")
        entry = self._entries.get(key)
        if entry is None:
            self._entries[key] = LibraryEntry(route, realized_cost)
        elif realized_cost < entry.score:
            if route != entry.route:
                logger.debug("library %s: %s replaces %s (%.6g < %.6g)",
                             key, route, entry.route, realized_cost, entry.score)
            entry.route = route
            entry.score = realized_cost
        return self

    def scores(self) -> Dict[str, float]:
        return {key.canonical(): entry.score for key, entry in self._entries.items()}

    def to_json(self) -> str:
        document = {
            key.canonical(): {"route": list(entry.route.edge_ids), "score": entry.score, "hits": entry.hits}
            for key, entry in self._entries.items()
        }
        return json.dumps(document, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str, network: Optional[Network] = None) -> FeatureLibrary:
        """Rebuild an exported library; entries that no longer fit ``network`` are skipped."""
        try:
            document = json.loads(text)
        except json.JSONDecodeError as e:
            raise LibraryError(f"library is not valid JSON: {e}") from e
        if not isinstance(document, dict):
            raise LibraryError("library must be a JSON object")
        library = cls()
        for text_key, value in document.items():
            key = FeatureKey.parse(text_key)
            if not isinstance(value, dict) or set(value) != {"route", "score", "hits"}:
                raise LibraryError(f"library entry '{text_key}' must have exactly route, score, hits")
            route_ids, score, hits = value["route"], value["score"], value["hits"]
            if not (isinstance(route_ids, list) and route_ids and all(isinstance(e, str) for e in route_ids)):
                raise LibraryError(f"library entry '{text_key}': route must be a non-empty list of edge ids")
            if isinstance(score, bool) or not isinstance(score, (int, float)) or not score > 0:
                raise LibraryError(f"library entry '{text_key}': score must be > 0")
            if isinstance(hits, bool) or not isinstance(hits, int) or hits < 0:
                raise LibraryError(f"library entry '{text_key}': hits must be a non-negative integer")
            route = Route(key.origin_zone, key.dest_zone, tuple(route_ids))
            if network is not None:
                try:
                    check_route(network, route)
                except NetworkError as e:
                    logger.warning("skipping library entry %s: %s", text_key, e)
                    continue
            library._entries[key] = LibraryEntry(route, float(score), hits)
        return library


Candidates = Union[ChoiceSet, Callable[[FeatureKey], ChoiceSet]]


def _candidates_for(key: FeatureKey, candidates: Candidates) -> ChoiceSet:
    return candidates(key) if callable(candidates) else candidates


def reason(key: FeatureKey, candidates: ChoiceSet, params: ChoiceParams, stream: SeededStream) -> Route:
    """Sample one candidate; costs are expected in the key's driver-class weights."""
    if not candidates.routes:
        raise ChoiceError(f"no candidate routes for {key}")
    probabilities = choice_probabilities(candidates.costs, params)
    return candidates.routes[sample_route(probabilities, stream)]


def decide(packet: DriverPacket, library: Optional[FeatureLibrary], candidates: Candidates,
           params: ChoiceParams, stream: SeededStream, stats: Optional[LookupStats] = None) -> Route:
    """Perceive, retrieve, and reason on a miss. ``library=None`` always reasons."""
    key = perceive(packet)
    entry = library.retrieve(key, stats) if library is not None else None
    if entry is not None:
        route = entry.route
    else:
        choice_set = _candidates_for(key, candidates)
        started = time.perf_counter()
        route = reason(key, choice_set, params, stream)
        if stats is not None:
            stats.reasoning_seconds += time.perf_counter() - started
    packet.chosen_route = route
    return route


# ─────────────────────────────────────────────────────────────────────────────
# En-route events
# ─────────────────────────────────────────────────────────────────────────────

EVENT_FIELDS = ("at", "weather", "road_condition", "urgency", "physiological",
                "zones", "incident_edges", "incident_factor")


@dataclass(frozen=True)
class EnvironmentEvent:
    """A change sensed at simulation-clock second ``at``.

    ``zones`` limits the event to packets leaving those zones (empty means
    all packets). Incident edges have their travel time multiplied by
    ``incident_factor`` from the iteration the event fires in.
    """

    at: float
    weather: Optional[str] = None
    road_condition: Optional[str] = None
    urgency: Optional[str] = None
    physiological: Optional[str] = None
    zones: Tuple[str, ...] = ()
    incident_edges: Tuple[str, ...] = ()
    incident_factor: float = 10.0

    def __post_init__(self):
        object.__setattr__(self, "zones", tuple(self.zones))
        object.__setattr__(self, "incident_edges", tuple(self.incident_edges))
        if not (math.isfinite(self.at) and self.at >= 0):
            raise ConfigError(f"event time must be >= 0, got {self.at}")
        if not (math.isfinite(self.incident_factor) and self.incident_factor >= 1):
            raise ConfigError(f"incident_factor must be >= 1, got {self.incident_factor}")
        try:
            for value, allowed, name in ((self.weather, WEATHER, "weather"),
                                         (self.road_condition, ROAD_CONDITIONS, "road_condition"),
                                         (self.urgency, URGENCY_LEVELS, "urgency"),
                                         (self.physiological, PHYSIOLOGICAL_STATES, "physiological")):
                if value is not None:
                    _require(value, allowed, name)
        except InputError as e:
            raise ConfigError(f"event at {self.at}: {e}") from e

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> EnvironmentEvent:
        unknown = [name for name in data if name not in EVENT_FIELDS]
        if unknown:
            raise ConfigError(f"unknown event field '{unknown[0]}'")
        if "at" not in data:
            raise ConfigError("event is missing field 'at'")
        try:
            return cls(**{**data, "at": float(data["at"])})
        except ConfigError:
            raise
        except (TypeError, ValueError) as e:
            raise ConfigError(f"invalid event {dict(data)}: {e}") from e

    def iteration(self, work_period: float) -> int:
        return int(self.at // work_period)

    def affects(self, packet: DriverPacket) -> bool:
        return not self.zones or packet.origin_zone in self.zones

    def as_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"at": self.at}
        for name in ("weather", "road_condition", "urgency", "physiological"):
            if getattr(self, name) is not None:
                data[name] = getattr(self, name)
        if self.zones:
            data["zones"] = list(self.zones)
        if self.incident_edges:
            data["incident_edges"] = list(self.incident_edges)
            data["incident_factor"] = self.incident_factor
        return data


def apply_event(packet: DriverPacket, event: EnvironmentEvent) -> bool:
    """Update the packet's temporary attributes and environment; True if anything changed."""
    if not event.affects(packet):
        return False
    road_condition = event.road_condition
    if road_condition is None and event.incident_edges:
        road_condition = "incident"
    temporary = replace(
        packet.temporary,
        urgency=event.urgency or packet.temporary.urgency,
        physiological=event.physiological or packet.temporary.physiological,
    )
    environment = replace(
        packet.environment,
        weather=event.weather or packet.environment.weather,
        road_condition=road_condition or packet.environment.road_condition,
    )
    changed = temporary != packet.temporary or environment != packet.environment
    packet.temporary, packet.environment = temporary, environment
    return changed


def resense(packet: DriverPacket, event: EnvironmentEvent, library: Optional[FeatureLibrary],
            candidates: Candidates, params: ChoiceParams, stream: SeededStream,
            stats: Optional[LookupStats] = None) -> Route:
    """Apply ``event`` and repeat perceive -> retrieve -> reason if the key changed."""
    if not apply_event(packet, event) and packet.chosen_route is not None:
        return packet.chosen_route
    return decide(packet, library, candidates, params, stream, stats)


# ─────────────────────────────────────────────────────────────────────────────
# Packets
# ─────────────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Profile:
    static: StaticAttributes
    urgency: str = "low"
    physiological: str = "normal"


DEFAULT_ROSTER: Tuple[Profile, ...] = (
    Profile(StaticAttributes("young", "female", "novice")),
    Profile(StaticAttributes("middle", "male", "experienced")),
    Profile(StaticAttributes("senior", "female", "experienced"), physiological="fatigued"),
    Profile(StaticAttributes("middle", "male", "experienced"), urgency="high"),
)


def build_packets(entries: List[Tuple[str, str, float]], packets_per_od: int = 8,
                  roster: Tuple[Profile, ...] = DEFAULT_ROSTER,
                  environment: EnvironmentState = EnvironmentState()) -> List[DriverPacket]:
    """Split every positive OD entry into equal packets cycling through ``roster``.

    Packet ids run in OD order, so they fix the merge order of a run.
    """
    if packets_per_od < 1:
        raise ConfigError(f"packets_per_od must be >= 1, got {packets_per_od}")
    packets = []
    for origin, dest, demand in entries:
        if demand <= 0:
            continue
        share = demand / packets_per_od
        for index in range(packets_per_od):
            profile = roster[index % len(roster)]
            packets.append(DriverPacket(
                id=len(packets),
                origin_zone=origin,
                static=profile.static,
                temporary=TemporaryAttributes(dest, profile.urgency, profile.physiological),
                environment=environment,
                demand=share,
            ))
    return packets
