"""Monitoring plan derivation: which sensor watches which component, and why.

Placement follows the threat graph: host-class requirements attach to the
threatened (or sourcing) component, network requirements materialise as
NIDS placements on both endpoints of every source/target pair. Host-class
sensors never attach to the external network component.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .catalog import Catalog
from .graph import ThreatGraph
from .model import HOST_SENSORS, Placement, Sensor


class UnsupportedFormatError(ValueError):
    """Requested rendering format is not one of text/csv."""


@dataclass(frozen=True)
class PlanEntry:
    component: str
    sensor: Sensor
    signal: str
    justification: tuple[str, ...]


@dataclass(frozen=True)
class MonitoringPlan:
    entries: tuple[PlanEntry, ...]
    generated_from: str


def derive_plan(graph: ThreatGraph, catalog: Catalog) -> MonitoringPlan:
    """Derive the monitoring plan for a graph built from ``catalog``.

    Pure function of its inputs: same catalog and graph, same plan.
    """
    cells: dict[tuple[str, str, str], set[str]] = {}

    def add(component: str, sensor: Sensor, signal: str, scenario: str) -> None:
        if sensor in HOST_SENSORS and component == graph.external_id:
            return
        key = (component, sensor.value, signal)
        cells.setdefault(key, set()).add(scenario)

    for scenario in catalog.scenarios:
        sources = catalog.expand_refs(scenario.sources)
        targets = catalog.expand_refs(scenario.targets)
        for requirement in scenario.monitoring:
            if requirement.placement_hint is Placement.TARGET:
                for component in targets:
                    add(component, requirement.sensor, requirement.signal, scenario.id)
            elif requirement.placement_hint is Placement.SOURCE:
                for component in sources:
                    add(component, requirement.sensor, requirement.signal, scenario.id)
            else:
                # EDGE: network monitoring lands as NIDS on both endpoints.
                for src in sources:
                    add(src, Sensor.NIDS, requirement.signal, scenario.id)
                for dst in targets:
                    add(dst, Sensor.NIDS, requirement.signal, scenario.id)

    entries = tuple(
        PlanEntry(
            component=component,
            sensor=Sensor(sensor),
            signal=signal,
            justification=tuple(sorted(cells[(component, sensor, signal)])),
        )
        for component, sensor, signal in sorted(cells)
    )
    return MonitoringPlan(entries=entries, generated_from=catalog.version)


_HEADER = ("component", "sensor", "signal", "justification")


def render_plan(plan: MonitoringPlan, format: str = "text") -> str:
    """Render a plan as aligned text or CSV; deterministic either way."""
    fmt = format.lower()
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(_HEADER)
        for entry in plan.entries:
            writer.writerow(
                (
                    entry.component,
                    entry.sensor.value,
                    entry.signal,
                    ";".join(entry.justification),
                )
            )
        return buffer.getvalue()
    if fmt == "text":
        rows = [
            (
                entry.component,
                entry.sensor.value,
                entry.signal,
                ";".join(entry.justification),
            )
            for entry in plan.entries
        ]
        widths = [
            max([len(h)] + [len(row[i]) for row in rows])
            for i, h in enumerate(_HEADER)
        ]
        lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(_HEADER)).rstrip()]
        for row in rows:
            lines.append(
                "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
            )
        return "\n".join(lines) + "\n"
    raise UnsupportedFormatError(f"unsupported plan format: {format!r}")
