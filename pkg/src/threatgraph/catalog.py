"""Threat catalog: on-disk schema, parser/validator and the default dataset.

A catalog is a UTF-8 JSON document with top-level keys ``version``,
``taxonomy``, ``components``, ``scenarios`` (plus optional ``notes`` for
dataset documentation). The shipped default dataset encodes the key threats
to the 5G core network decomposed into events with source/target component
assignments and monitoring requirements.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Mapping

from .model import (
    BAD_ID_FORMAT,
    BAD_TAXONOMY,
    COMPONENT_ID_RE,
    DANGLING_REFERENCE,
    DUPLICATE_ID,
    EMPTY_EVENT_LIST,
    EMPTY_SOURCES,
    EMPTY_TARGETS,
    HOST_SENSORS,
    MISSING_EXTERNAL,
    MULTIPLE_EXTERNAL,
    UNKNOWN_TACTIC,
    Component,
    ComponentKind,
    MonitoringRequirement,
    Placement,
    Sensor,
    TacticStage,
    ThreatEvent,
    ThreatScenario,
    Violation,
)

DEFAULT_CATALOG_RESOURCE = "default_catalog.json"


class CatalogError(Exception):
    """Base class for catalog load failures."""


class CatalogSyntaxError(CatalogError):
    """The document is not well-formed catalog JSON."""


class ResolutionError(CatalogError):
    """A cross-reference does not resolve (dangling id)."""


class DuplicateIdError(CatalogError):
    """Two entities share an id that must be unique."""


@dataclass(frozen=True)
class Catalog:
    """A fully resolved threat catalog; immutable after parse."""

    components: tuple[Component, ...]
    scenarios: tuple[ThreatScenario, ...]
    taxonomy: tuple[TacticStage, ...]
    version: str
    notes: tuple[str, ...] = ()

    @property
    def components_by_id(self) -> Mapping[str, Component]:
        return {c.id: c for c in self.components}

    @property
    def scenarios_by_id(self) -> Mapping[str, ThreatScenario]:
        return {s.id: s for s in self.scenarios}

    @property
    def stages_by_name(self) -> Mapping[str, TacticStage]:
        return {t.name: t for t in self.taxonomy}

    def scenario_for_alert_type(self, alert_type: str) -> ThreatScenario | None:
        """Resolve a scenario or event id to its (parent) scenario."""
        scenario = self.scenarios_by_id.get(alert_type)
        if scenario is not None:
            return scenario
        for candidate in self.scenarios:
            for event in candidate.events:
                if event.id == alert_type:
                    return candidate
        return None

    def tactic_of(self, alert_type: str) -> TacticStage:
        """Tactic stage for an alert type.

        Event-level types use the event's own tactic; scenario-level types
        use the earliest (minimum index) tactic among the scenario's events.
        """
        stages = self.stages_by_name
        scenario = self.scenarios_by_id.get(alert_type)
        if scenario is not None:
            return min(
                (stages[e.tactic] for e in scenario.events), key=lambda t: t.index
            )
        for candidate in self.scenarios:
            for event in candidate.events:
                if event.id == alert_type:
                    return stages[event.tactic]
        raise KeyError(alert_type)

    def expand_refs(self, refs: tuple[str, ...]) -> tuple[str, ...]:
        """Expand component ids / kind names to a sorted tuple of component ids."""
        by_id = self.components_by_id
        out: set[str] = set()
        for ref in refs:
            if ref in by_id:
                out.add(ref)
                continue
            matched = [c.id for c in self.components if c.kind.value == ref]
            if not matched:
                raise ResolutionError(f"unresolved component reference: {ref!r}")
            out.update(matched)
        return tuple(sorted(out))


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

# Placement defaults applied when a requirement omits placement_hint:
# host sensors watch the threatened host, network sensors watch the link.
_DEFAULT_PLACEMENT = {
    sensor: (Placement.TARGET if sensor in HOST_SENSORS else Placement.EDGE)
    for sensor in Sensor
}


def _require(mapping: Any, key: str, where: str) -> Any:
    if not isinstance(mapping, dict):
        raise CatalogSyntaxError(f"{where}: expected an object")
    if key not in mapping:
        raise CatalogSyntaxError(f"{where}: missing field {key!r}")
    return mapping[key]


def _parse_taxonomy(raw: Any) -> tuple[TacticStage, ...]:
    if not isinstance(raw, list) or not raw:
        raise CatalogSyntaxError("taxonomy: expected a non-empty list")
    stages = []
    for i, entry in enumerate(raw):
        where = f"taxonomy[{i}]"
        index = _require(entry, "index", where)
        name = _require(entry, "name", where)
        if not isinstance(index, int) or not isinstance(name, str) or not name:
            raise CatalogSyntaxError(f"{where}: bad stage entry")
        stages.append(TacticStage(index=index, name=name))
    return tuple(stages)


def _parse_component(entry: Any, where: str) -> Component:
    cid = _require(entry, "id", where)
    kind = _require(entry, "kind", where)
    if not isinstance(cid, str) or not cid:
        raise CatalogSyntaxError(f"{where}: component id must be a non-empty string")
    try:
        parsed_kind = ComponentKind.parse(str(kind))
    except ValueError as exc:
        raise CatalogSyntaxError(f"{where}: {exc}") from None
    return Component(
        id=cid, kind=parsed_kind, description=str(entry.get("description", ""))
    )


def _parse_requirement(entry: Any, where: str) -> MonitoringRequirement:
    sensor_raw = _require(entry, "sensor", where)
    signal = _require(entry, "signal", where)
    try:
        sensor = Sensor.parse(str(sensor_raw))
    except ValueError as exc:
        raise CatalogSyntaxError(f"{where}: {exc}") from None
    hint_raw = entry.get("placement_hint")
    if hint_raw is None:
        hint = _DEFAULT_PLACEMENT[sensor]
    else:
        try:
            hint = Placement.parse(str(hint_raw))
        except ValueError as exc:
            raise CatalogSyntaxError(f"{where}: {exc}") from None
    return MonitoringRequirement(sensor=sensor, signal=str(signal), placement_hint=hint)


def _parse_scenario(entry: Any, where: str) -> ThreatScenario:
    sid = _require(entry, "id", where)
    name = _require(entry, "name", where)
    events_raw = _require(entry, "events", where)
    sources_raw = _require(entry, "sources", where)
    targets_raw = _require(entry, "targets", where)
    if not isinstance(events_raw, list):
        raise CatalogSyntaxError(f"{where}.events: expected a list")
    events = []
    for i, ev in enumerate(events_raw):
        ev_where = f"{where}.events[{i}]"
        events.append(
            ThreatEvent(
                id=str(_require(ev, "id", ev_where)),
                name=str(_require(ev, "name", ev_where)),
                tactic=str(_require(ev, "tactic", ev_where)),
            )
        )
    for label, refs in (("sources", sources_raw), ("targets", targets_raw)):
        if not isinstance(refs, list) or not all(isinstance(r, str) for r in refs):
            raise CatalogSyntaxError(f"{where}.{label}: expected a list of strings")
    monitoring = tuple(
        _parse_requirement(req, f"{where}.monitoring[{i}]")
        for i, req in enumerate(entry.get("monitoring", []))
    )
    return ThreatScenario(
        id=str(sid),
        name=str(name),
        events=tuple(events),
        sources=tuple(sorted(set(sources_raw))),
        targets=tuple(sorted(set(targets_raw))),
        monitoring=monitoring,
        rationale=str(entry.get("rationale", "")),
        provenance=str(entry.get("provenance", "documented")),
    )


def parse_catalog(text: str) -> Catalog:
    """Parse and fully resolve a catalog document.

    Raises :class:`CatalogSyntaxError` for malformed documents,
    :class:`DuplicateIdError` for repeated ids and
    :class:`ResolutionError` for dangling references.
    """
    if not text.strip():
        raise CatalogSyntaxError("empty document")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogSyntaxError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise CatalogSyntaxError("top level: expected an object")

    version = str(_require(doc, "version", "document"))
    taxonomy = _parse_taxonomy(_require(doc, "taxonomy", "document"))
    components_raw = _require(doc, "components", "document")
    scenarios_raw = _require(doc, "scenarios", "document")
    if not isinstance(components_raw, list) or not isinstance(scenarios_raw, list):
        raise CatalogSyntaxError("components/scenarios: expected lists")

    components = tuple(
        _parse_component(entry, f"components[{i}]")
        for i, entry in enumerate(components_raw)
    )
    scenarios = tuple(
        _parse_scenario(entry, f"scenarios[{i}]")
        for i, entry in enumerate(scenarios_raw)
    )
    notes_raw = doc.get("notes", [])
    if not isinstance(notes_raw, list) or not all(
        isinstance(n, str) for n in notes_raw
    ):
        raise CatalogSyntaxError("notes: expected a list of strings")

    catalog = Catalog(
        components=components,
        scenarios=scenarios,
        taxonomy=taxonomy,
        version=version,
        notes=tuple(notes_raw),
    )
    _check_ids(catalog)
    _check_references(catalog)
    return catalog


def _check_ids(catalog: Catalog) -> None:
    seen: set[str] = set()
    for component in catalog.components:
        if component.id in seen:
            raise DuplicateIdError(f"duplicate component id: {component.id!r}")
        seen.add(component.id)
    # Scenario and event ids share one namespace: both are legal alert types.
    seen = set()
    for scenario in catalog.scenarios:
        if scenario.id in seen:
            raise DuplicateIdError(f"duplicate scenario id: {scenario.id!r}")
        seen.add(scenario.id)
        for event in scenario.events:
            if event.id in seen:
                raise DuplicateIdError(f"duplicate event id: {event.id!r}")
            seen.add(event.id)


def _check_references(catalog: Catalog) -> None:
    stages = catalog.stages_by_name
    for scenario in catalog.scenarios:
        for event in scenario.events:
            if event.tactic not in stages:
                raise ResolutionError(
                    f"scenario {scenario.id!r}: unknown tactic {event.tactic!r}"
                )
        for refs in (scenario.sources, scenario.targets):
            try:
                catalog.expand_refs(refs)
            except ResolutionError as exc:
                raise ResolutionError(f"scenario {scenario.id!r}: {exc}") from None


def serialize_catalog(catalog: Catalog) -> str:
    """Render a catalog back to its canonical JSON document form."""
    doc: dict[str, Any] = {
        "version": catalog.version,
        "taxonomy": [{"index": t.index, "name": t.name} for t in catalog.taxonomy],
        "components": [
            {"id": c.id, "kind": c.kind.value, "description": c.description}
            for c in catalog.components
        ],
        "scenarios": [
            {
                "id": s.id,
                "name": s.name,
                "events": [
                    {"id": e.id, "name": e.name, "tactic": e.tactic} for e in s.events
                ],
                "sources": list(s.sources),
                "targets": list(s.targets),
                "monitoring": [
                    {
                        "sensor": m.sensor.value,
                        "signal": m.signal,
                        "placement_hint": m.placement_hint.value,
                    }
                    for m in s.monitoring
                ],
                "rationale": s.rationale,
                "provenance": s.provenance,
            }
            for s in catalog.scenarios
        ],
    }
    if catalog.notes:
        doc["notes"] = list(catalog.notes)
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# Validation (violations are data, not failures)
# ---------------------------------------------------------------------------


def validate_catalog(catalog: Catalog) -> list[Violation]:
    """All invariant breaches, in stable order; empty means the catalog is valid."""
    violations: list[Violation] = []

    indices = [t.index for t in catalog.taxonomy]
    if indices != list(range(len(indices))):
        violations.append(
            Violation(BAD_TAXONOMY, "stage indices must be 0..n-1 in order", "taxonomy")
        )
    names = [t.name for t in catalog.taxonomy]
    if len(set(names)) != len(names):
        violations.append(
            Violation(BAD_TAXONOMY, "stage names must be unique", "taxonomy")
        )

    seen_components: set[str] = set()
    externals = []
    for i, component in enumerate(catalog.components):
        path = f"components[{i}].id"
        if not COMPONENT_ID_RE.match(component.id or ""):
            violations.append(
                Violation(BAD_ID_FORMAT, f"bad component id {component.id!r}", path)
            )
        if component.id in seen_components:
            violations.append(
                Violation(DUPLICATE_ID, f"duplicate component id {component.id!r}", path)
            )
        seen_components.add(component.id)
        if component.kind is ComponentKind.EXTERNAL:
            externals.append(component.id)
    if len(externals) > 1:
        violations.append(
            Violation(
                MULTIPLE_EXTERNAL,
                f"{len(externals)} components of kind EXTERNAL: {', '.join(externals)}",
                "components",
            )
        )
    elif not externals:
        violations.append(
            Violation(MISSING_EXTERNAL, "no component of kind EXTERNAL", "components")
        )

    stages = catalog.stages_by_name
    seen_ids: set[str] = set()
    for i, scenario in enumerate(catalog.scenarios):
        where = f"scenarios[{i}]"
        if scenario.id in seen_ids:
            violations.append(
                Violation(DUPLICATE_ID, f"duplicate scenario id {scenario.id!r}", f"{where}.id")
            )
        seen_ids.add(scenario.id)
        if not scenario.events:
            violations.append(
                Violation(EMPTY_EVENT_LIST, f"scenario {scenario.id!r} has no events", f"{where}.events")
            )
        for j, event in enumerate(scenario.events):
            if event.id in seen_ids:
                violations.append(
                    Violation(DUPLICATE_ID, f"duplicate event id {event.id!r}", f"{where}.events[{j}].id")
                )
            seen_ids.add(event.id)
            if event.tactic not in stages:
                violations.append(
                    Violation(UNKNOWN_TACTIC, f"unknown tactic {event.tactic!r}", f"{where}.events[{j}].tactic")
                )
        if not scenario.sources:
            violations.append(
                Violation(EMPTY_SOURCES, f"scenario {scenario.id!r} has no sources", f"{where}.sources")
            )
        if not scenario.targets:
            violations.append(
                Violation(EMPTY_TARGETS, f"scenario {scenario.id!r} has no targets", f"{where}.targets")
            )
        for label, refs in (("sources", scenario.sources), ("targets", scenario.targets)):
            for ref in refs:
                try:
                    catalog.expand_refs((ref,))
                except ResolutionError:
                    violations.append(
                        Violation(DANGLING_REFERENCE, f"unresolved reference {ref!r}", f"{where}.{label}")
                    )
    return violations


# ---------------------------------------------------------------------------
# Default dataset
# ---------------------------------------------------------------------------

_default: Catalog | None = None


def default_catalog_text() -> str:
    """Raw text of the shipped default catalog document."""
    return (
        resources.files("threatgraph.data")
        .joinpath(DEFAULT_CATALOG_RESOURCE)
        .read_text(encoding="utf-8")
    )


def default_catalog() -> Catalog:
    """The embedded default dataset (parsed once, then cached)."""
    global _default
    if _default is None:
        _default = parse_catalog(default_catalog_text())
    return _default
