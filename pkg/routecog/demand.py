"""
OD demand matrices in a small FMA-style text format.

    * comment lines start with an asterisk
    3
    Z1 Z2 Z3
    0 10 20
    5 0 0.5
    7 8 0

After the comments: the zone count, the zone ids, then one row of demand
(vehicles/hour) per origin zone. write_od emits comments first, integral
values without a decimal point and every other value in shortest
round-trip form, so parse_od(write_od(m)) == m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import List, Sequence, Tuple, Union

from .errors import DemandError
from .network import Network


@dataclass(frozen=True)
class ODMatrix:
    zone_ids: Tuple[str, ...]
    demand: Tuple[Tuple[float, ...], ...]
    comments: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "zone_ids", tuple(self.zone_ids))
        object.__setattr__(self, "demand", tuple(tuple(float(v) for v in row) for row in self.demand))
        object.__setattr__(self, "comments", tuple(self.comments))
        size = len(self.zone_ids)
        if len(set(self.zone_ids)) != size:
            raise DemandError("zone ids must be unique")
        if len(self.demand) != size:
            raise DemandError(f"expected {size} rows, got {len(self.demand)} (matrix must be square)")
        for origin, row in zip(self.zone_ids, self.demand):
            if len(row) != size:
                raise DemandError(f"row {origin} has {len(row)} values, expected {size} (matrix must be square)")
            for dest, value in zip(self.zone_ids, row):
                if not math.isfinite(value):
                    raise DemandError(f"non-finite demand {value} at row {origin}, column {dest}")
                if value < 0:
                    raise DemandError(f"negative demand {_format(value)} at row {origin}, column {dest}")
                if origin == dest and value != 0:
                    raise DemandError(f"nonzero diagonal entry {_format(value)} at zone {origin}")

    @property
    def size(self) -> int:
        return len(self.zone_ids)

    def value(self, origin: str, dest: str) -> float:
        try:
            return self.demand[self.zone_ids.index(origin)][self.zone_ids.index(dest)]
        except ValueError:
            raise DemandError(f"unknown zone in pair {origin}->{dest}") from None

    def entries(self) -> List[Tuple[str, str, float]]:
        """Positive (origin, dest, demand) cells in row-major order."""
        return [
            (origin, dest, value)
            for origin, row in zip(self.zone_ids, self.demand)
            for dest, value in zip(self.zone_ids, row)
            if value > 0
        ]

    def total(self) -> float:
        return math.fsum(value for row in self.demand for value in row)

    def scaled(self, factor: float) -> ODMatrix:
        if factor == 1:
            return self
        return ODMatrix(self.zone_ids, tuple(tuple(v * factor for v in row) for row in self.demand), self.comments)


def _format(value: float) -> str:
    if value.is_integer():
        return str(int(value))
    return repr(value)


def parse_od(source: str) -> ODMatrix:
    comments: List[str] = []
    data: List[Tuple[int, List[str]]] = []
    for number, line in enumerate(source.splitlines(), start=1):
        if line.startswith("*"):
            comments.append(line[1:])
            continue
        tokens = line.split()
        if tokens:
            data.append((number, tokens))

    if not data:
        raise DemandError("missing zone count line")
    number, tokens = data[0]
    if len(tokens) != 1 or not tokens[0].isdigit():
        raise DemandError(f"line {number}: expected the zone count, got '{' '.join(tokens)}'")
    size = int(tokens[0])
    if len(data) < 2:
        raise DemandError("missing zone id line")
    number, zone_ids = data[1]
    if len(zone_ids) != size:
        raise DemandError(f"line {number}: zone count is {size} but {len(zone_ids)} zone ids are listed")
    duplicates = sorted({z for z in zone_ids if zone_ids.count(z) > 1})
    if duplicates:
        raise DemandError(f"line {number}: duplicate zone id '{duplicates[0]}'")

    rows = data[2:]
    if len(rows) != size:
        raise DemandError(f"expected {size} demand rows, got {len(rows)} (matrix must be square)")
    demand = []
    for origin, (number, tokens) in zip(zone_ids, rows):
        if len(tokens) != size:
            raise DemandError(f"line {number}: row {origin} has {len(tokens)} values, expected {size} "
                              f"(matrix must be square)")
        row = []
        for dest, token in zip(zone_ids, tokens):
            try:
                value = float(token)
            except ValueError:
                raise DemandError(f"line {number}: '{token}' at row {origin}, column {dest} is not a number") from None
            row.append(value)
        demand.append(tuple(row))
    return ODMatrix(tuple(zone_ids), tuple(demand), tuple(comments))


def write_od(matrix: ODMatrix) -> str:
    lines = ["*" + comment for comment in matrix.comments]
    lines.append(str(matrix.size))
    lines.append(" ".join(matrix.zone_ids))
    for row in matrix.demand:
        lines.append(" ".join(_format(value) for value in row))
    return "\n".join(lines) + "\n"


def read_od(path: Union[str, Path]) -> ODMatrix:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise DemandError(f"cannot read OD file {path}: {e.strerror}") from e
    return parse_od(text)


def check_od_zones(od: ODMatrix, network: Network) -> None:
    for zone_id in od.zone_ids:
        if zone_id not in network.zones:
            raise DemandError(f"unknown zone id '{zone_id}' (not in the network)")


def fixture_od_text() -> str:
    return (resources.files("routecog") / "data" / "table1.od").read_text(encoding="utf-8")


def fixture_od() -> ODMatrix:
    """The bundled 12-zone flat-time OD matrix."""
    return parse_od(fixture_od_text())


def od_from_rows(zone_ids: Sequence[str], rows: Sequence[Sequence[float]]) -> ODMatrix:
    return ODMatrix(tuple(zone_ids), tuple(tuple(row) for row in rows))
