from __future__ import annotations

import json
import random

import pytest

from threatgraph import Alert, build_graph, default_catalog, parse_catalog

TACTIC_NAMES = [
    "initial-access",
    "execution",
    "persistence",
    "privilege-escalation",
    "defense-evasion",
    "credential-access",
    "discovery",
    "lateral-movement",
    "collection",
    "command-and-control",
    "exfiltration",
    "impact",
]


@pytest.fixture(scope="session")
def catalog():
    return default_catalog()


@pytest.fixture(scope="session")
def graph(catalog):
    return build_graph(catalog)


def make_alert(ts, src, dest, alert_type, alert_id, meta=None):
    return Alert(
        ts=ts, src=src, dest=dest, alert_type=alert_type,
        alert_id=alert_id, meta=meta or {},
    )


def tiny_catalog_doc():
    """Minimal two-component, one-scenario catalog document."""
    return {
        "version": "test",
        "taxonomy": [{"index": i, "name": n} for i, n in enumerate(TACTIC_NAMES)],
        "components": [
            {"id": "EXTERNAL", "kind": "EXTERNAL", "description": "outside"},
            {"id": "NEF", "kind": "NF", "description": "exposure function"},
        ],
        "scenarios": [
            {
                "id": "API_EXPLOIT",
                "name": "API vulnerability exploit",
                "events": [
                    {"id": "SQL_INJECTION", "name": "SQL injection", "tactic": "initial-access"}
                ],
                "sources": ["EXTERNAL"],
                "targets": ["NEF"],
                "monitoring": [
                    {"sensor": "APP_LOG", "signal": "invalid input detection", "placement_hint": "TARGET"}
                ],
            }
        ],
    }


@pytest.fixture()
def tiny_catalog():
    return parse_catalog(json.dumps(tiny_catalog_doc()))


def random_catalog(rng: random.Random, max_components: int = 6, max_scenarios: int = 6):
    """A random valid catalog: one EXTERNAL plus assorted components/scenarios."""
    kinds = ["MANO", "SDN", "NF", "NF", "VI", "PI"]
    n_components = rng.randint(1, max_components)
    components = [{"id": "EXTERNAL", "kind": "EXTERNAL", "description": ""}]
    for k in range(n_components - 1):
        components.append(
            {"id": f"C{k}", "kind": rng.choice(kinds), "description": ""}
        )
    component_ids = [c["id"] for c in components]
    present_kinds = sorted({c["kind"] for c in components})
    refs = component_ids + present_kinds

    def some_refs():
        count = rng.randint(1, min(3, len(refs)))
        return sorted(set(rng.sample(refs, count)))

    scenarios = []
    event_counter = 0
    for s in range(rng.randint(0, max_scenarios)):
        events = []
        for _ in range(rng.randint(1, 3)):
            events.append(
                {
                    "id": f"E{event_counter}",
                    "name": f"event {event_counter}",
                    "tactic": rng.choice(TACTIC_NAMES),
                }
            )
            event_counter += 1
        scenarios.append(
            {
                "id": f"S{s}",
                "name": f"scenario {s}",
                "events": events,
                "sources": some_refs(),
                "targets": some_refs(),
                "monitoring": [],
            }
        )
    doc = {
        "version": "random",
        "taxonomy": [{"index": i, "name": n} for i, n in enumerate(TACTIC_NAMES)],
        "components": components,
        "scenarios": scenarios,
    }
    return parse_catalog(json.dumps(doc))
