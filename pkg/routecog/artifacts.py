"""
Result files. Every file is written to a temporary sibling and renamed into
place, so a file is either complete or absent.
"""

from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path
from typing import Dict, List, Sequence, Union

from .assignment import AssignmentResult, IterationReport
from .demand import ODMatrix

ITERATIONS_HEADER = ("iteration", "avg_travel_cost", "cost_variance", "route_search_ms", "cache_hit_rate", "converged")
FLOWS_HEADER = ("od_origin", "od_dest", "route_edge_ids", "demand")
COMPARE_HEADER = ("iteration", "on_avg_travel_cost", "off_avg_travel_cost",
                  "on_route_search_ms", "off_route_search_ms", "on_cache_hit_rate")


def write_text_atomic(path: Union[str, Path], text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, temp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(temp, path)
    except BaseException:
        if os.path.exists(temp):
            os.unlink(temp)
        raise
    return path


def _csv(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _number(value: float) -> str:
    # str() of a float is its shortest round-trip form
    return str(float(value))


def iterations_csv(reports: Sequence[IterationReport]) -> str:
    return _csv(ITERATIONS_HEADER, [
        (r.iteration, _number(r.average_travel_cost), _number(r.cost_variance),
         _number(r.route_search_time * 1000), _number(r.cache_hit_rate), "true" if r.converged else "false")
        for r in reports
    ])


def flows_csv(result: AssignmentResult, od: ODMatrix) -> str:
    """Final route flows, ordered by OD matrix position then edge ids."""
    order = {zone_id: index for index, zone_id in enumerate(od.zone_ids)}
    routes = sorted(result.flows.by_route.items(),
                    key=lambda item: (order[item[0].origin_zone], order[item[0].dest_zone], item[0].edge_ids))
    return _csv(FLOWS_HEADER, [
        (route.origin_zone, route.dest_zone, ";".join(route.edge_ids), _number(demand))
        for route, demand in routes
    ])


def compare_csv(on: Sequence[IterationReport], off: Sequence[IterationReport]) -> str:
    return _csv(COMPARE_HEADER, [
        (a.iteration, _number(a.average_travel_cost), _number(b.average_travel_cost),
         _number(a.route_search_time * 1000), _number(b.route_search_time * 1000), _number(a.cache_hit_rate))
        for a, b in zip(on, off)
    ])


def write_run(out_dir: Union[str, Path], result: AssignmentResult, od: ODMatrix) -> List[Path]:
    """iterations.csv, flows.csv and library.json for one run."""
    out = Path(out_dir)
    contents: Dict[str, str] = {
        "iterations.csv": iterations_csv(result.reports),
        "flows.csv": flows_csv(result, od),
        "library.json": result.library.to_json(),
    }
    return [write_text_atomic(out / name, text) for name, text in contents.items()]
