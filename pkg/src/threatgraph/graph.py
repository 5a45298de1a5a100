"""Bipartite threat graph: build, alert matching, path enumeration, DOT export.

Vertices are infrastructure components and threat scenarios. A
component-to-scenario edge records a threat source; a scenario-to-component
edge records a threat target. A component targeted by one step can later
act as the source of the next, which is what multi-stage traversal and
alert pivoting exploit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .catalog import Catalog
from .model import Alert, ComponentKind


class UnknownComponentError(KeyError):
    """Requested component id is not a node of the graph."""


class UnknownAlertTypeError(KeyError):
    """Alert type resolves to no scenario known to the graph."""


@dataclass(frozen=True)
class MatchResult:
    """Outcome of matching one alert against the graph.

    ``matched`` holds iff both the source edge (src component -> scenario)
    and the target edge (scenario -> dest component) exist; otherwise the
    missing edge(s) are identified.
    """

    matched: bool
    scenario: str
    source_edge: tuple[str, str]
    target_edge: tuple[str, str]
    missing_source_edge: tuple[str, str] | None = None
    missing_target_edge: tuple[str, str] | None = None


@dataclass(frozen=True)
class AttackPath:
    """Alternating component/scenario walk of k >= 1 steps.

    ``nodes`` is (component0, scenario1, component1, ..., scenariok,
    componentk); a path of k steps represents the first intrusion plus
    k - 1 follow-on attack steps.
    """

    nodes: tuple[str, ...]

    @property
    def steps(self) -> int:
        return (len(self.nodes) - 1) // 2

    def render(self) -> str:
        return " -> ".join(self.nodes)


@dataclass(frozen=True)
class ThreatGraph:
    """Immutable bipartite threat graph; all queries are read-only."""

    component_ids: tuple[str, ...]
    scenario_ids: tuple[str, ...]
    source_edges: frozenset[tuple[str, str]]
    target_edges: frozenset[tuple[str, str]]
    alert_scenarios: Mapping[str, str]
    external_id: str | None

    def resolve_alert_type(self, alert_type: str) -> str:
        scenario = self.alert_scenarios.get(alert_type)
        if scenario is None:
            raise UnknownAlertTypeError(alert_type)
        return scenario

    def match_alert(self, alert: Alert) -> MatchResult:
        """Match one alert's (src, scenario, dest) triple against the edges."""
        scenario = self.resolve_alert_type(alert.alert_type)
        source_edge = (alert.src, scenario)
        target_edge = (scenario, alert.dest)
        missing_source = None if source_edge in self.source_edges else source_edge
        missing_target = None if target_edge in self.target_edges else target_edge
        return MatchResult(
            matched=missing_source is None and missing_target is None,
            scenario=scenario,
            source_edge=source_edge,
            target_edge=target_edge,
            missing_source_edge=missing_source,
            missing_target_edge=missing_target,
        )

    def scenarios_from(self, component_id: str) -> tuple[str, ...]:
        """Scenarios this component can launch, sorted."""
        return tuple(
            sorted(s for (c, s) in self.source_edges if c == component_id)
        )

    def components_targeted_by(self, scenario_id: str) -> tuple[str, ...]:
        """Components this scenario can hit, sorted."""
        return tuple(
            sorted(c for (s, c) in self.target_edges if s == scenario_id)
        )

    def components_sourcing(self, scenario_id: str) -> tuple[str, ...]:
        """Components this scenario can launch from, sorted."""
        return tuple(
            sorted(c for (c, s) in self.source_edges if s == scenario_id)
        )


def build_graph(catalog: Catalog) -> ThreatGraph:
    """Build the threat graph for a validated catalog.

    Kind references in scenario sources/targets expand to all components of
    that kind here, so traversal stays a pure set lookup.
    """
    source_edges: set[tuple[str, str]] = set()
    target_edges: set[tuple[str, str]] = set()
    alert_scenarios: dict[str, str] = {}
    for scenario in catalog.scenarios:
        alert_scenarios[scenario.id] = scenario.id
        for event in scenario.events:
            alert_scenarios[event.id] = scenario.id
        for component_id in catalog.expand_refs(scenario.sources):
            source_edges.add((component_id, scenario.id))
        for component_id in catalog.expand_refs(scenario.targets):
            target_edges.add((scenario.id, component_id))
    external = [
        c.id for c in catalog.components if c.kind is ComponentKind.EXTERNAL
    ]
    return ThreatGraph(
        component_ids=tuple(sorted(c.id for c in catalog.components)),
        scenario_ids=tuple(sorted(s.id for s in catalog.scenarios)),
        source_edges=frozenset(source_edges),
        target_edges=frozenset(target_edges),
        alert_scenarios=alert_scenarios,
        external_id=external[0] if len(external) == 1 else None,
    )


def match_alert(graph: ThreatGraph, alert: Alert) -> MatchResult:
    return graph.match_alert(alert)


def enumerate_paths(
    graph: ThreatGraph, start: str, max_steps: int
) -> list[AttackPath]:
    """All simple attack paths of 1..max_steps steps from ``start``.

    Simple means no component repeats (re-compromising a component adds no
    new placement information); scenario nodes may repeat. Output is in
    lexicographic order of the node sequences.
    """
    if start not in graph.component_ids:
        raise UnknownComponentError(start)
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")

    by_source: dict[str, list[str]] = {}
    for component_id, scenario_id in graph.source_edges:
        by_source.setdefault(component_id, []).append(scenario_id)
    by_scenario: dict[str, list[str]] = {}
    for scenario_id, component_id in graph.target_edges:
        by_scenario.setdefault(scenario_id, []).append(component_id)
    for adjacency in (by_source, by_scenario):
        for neighbours in adjacency.values():
            neighbours.sort()

    paths: list[AttackPath] = []

    def walk(component: str, trail: list[str], visited: set[str]) -> None:
        depth = (len(trail) - 1) // 2
        if depth >= max_steps:
            return
        for scenario in by_source.get(component, ()):
            for nxt in by_scenario.get(scenario, ()):
                if nxt in visited:
                    continue
                trail.extend((scenario, nxt))
                visited.add(nxt)
                paths.append(AttackPath(nodes=tuple(trail)))
                walk(nxt, trail, visited)
                visited.remove(nxt)
                del trail[-2:]

    walk(start, [start], {start})
    return paths


def export_dot(graph: ThreatGraph) -> str:
    """Deterministic DOT rendering: components as boxes, threats as ellipses."""
    lines = ["digraph threatgraph {"]
    nodes = [(cid, "box") for cid in graph.component_ids]
    nodes += [(sid, "ellipse") for sid in graph.scenario_ids]
    for node_id, shape in sorted(nodes):
        lines.append(f'    "{node_id}" [shape={shape}];')
    edges = sorted(graph.source_edges | graph.target_edges)
    if edges:
        lines.append("")
    for tail, head in edges:
        lines.append(f'    "{tail}" -> "{head}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
