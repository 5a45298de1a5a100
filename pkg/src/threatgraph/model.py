"""Core domain model for 5G core network threat monitoring.

Shared vocabulary used by every other module: infrastructure components,
threat scenarios decomposed into threat events, kill-chain tactic stages,
security alerts and correlated attack chains. All values are immutable
after construction and safe to share across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence


class ComponentKind(Enum):
    """The six infrastructure sub-systems a component can belong to."""

    EXTERNAL = "EXTERNAL"
    MANO = "MANO"
    SDN = "SDN"
    NF = "NF"
    VI = "VI"
    PI = "PI"

    @classmethod
    def parse(cls, value: str) -> "ComponentKind":
        try:
            return cls(value)
        except ValueError:
            raise ValueError(f"unknown component kind: {value!r}") from None


class Sensor(Enum):
    """Security monitoring sensor classes."""

    HIDS = "HIDS"
    NIDS = "NIDS"
    APP_LOG = "APP_LOG"
    SYS_LOG = "SYS_LOG"
    AV = "AV"
    ACCESS_LOG = "ACCESS_LOG"
    FLOW = "FLOW"

    @classmethod
    def parse(cls, value: str) -> "Sensor":
        try:
            return cls(value)
        except ValueError:
            raise ValueError(f"unknown sensor: {value!r}") from None


class Placement(Enum):
    """Where a monitoring requirement attaches relative to a threat."""

    SOURCE = "SOURCE"
    TARGET = "TARGET"
    EDGE = "EDGE"

    @classmethod
    def parse(cls, value: str) -> "Placement":
        try:
            return cls(value)
        except ValueError:
            raise ValueError(f"unknown placement hint: {value!r}") from None


# Sensors that run on a host; they can never attach to the external network.
HOST_SENSORS = frozenset(
    {Sensor.HIDS, Sensor.SYS_LOG, Sensor.AV, Sensor.APP_LOG, Sensor.ACCESS_LOG}
)

COMPONENT_ID_RE = re.compile(r"[A-Z][A-Z0-9_-]*\Z")


@dataclass(frozen=True)
class Component:
    """An infrastructure node that can act as a threat source and/or target."""

    id: str
    kind: ComponentKind
    description: str = ""


@dataclass(frozen=True)
class TacticStage:
    """One ordinal stage of the kill-chain tactic taxonomy."""

    index: int
    name: str


@dataclass(frozen=True)
class ThreatEvent:
    """A specific attack step (technique) realizing part of a scenario.

    ``tactic`` names a stage in the active taxonomy.
    """

    id: str
    name: str
    tactic: str


@dataclass(frozen=True)
class MonitoringRequirement:
    """A signal to monitor for one scenario, with a placement hint."""

    sensor: Sensor
    signal: str
    placement_hint: Placement


@dataclass(frozen=True)
class ThreatScenario:
    """A named adversarial objective decomposed into threat events.

    ``sources`` and ``targets`` hold component ids or component kind names;
    kind references expand to all components of that kind at graph build.
    ``provenance`` records whether the source/target assignment is directly
    documented in the threat literature or reconstructed by judgment.
    """

    id: str
    name: str
    events: tuple[ThreatEvent, ...]
    sources: tuple[str, ...]
    targets: tuple[str, ...]
    monitoring: tuple[MonitoringRequirement, ...] = ()
    rationale: str = ""
    provenance: str = "documented"


@dataclass(frozen=True)
class Alert:
    """A timestamped security alert, the unit of correlation.

    ``ts`` is integer milliseconds since epoch. ``alert_type`` references a
    threat event or a threat scenario id; event-level references resolve to
    the parent scenario for graph matching.
    """

    ts: int
    src: str
    dest: str
    alert_type: str
    alert_id: str
    meta: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class AttackChain:
    """An ordered run of correlated alerts forming a multi-stage hypothesis.

    ``anchored`` marks chains whose first alert originates at the external
    network component.
    """

    alerts: tuple[str, ...]
    tactics: tuple[int, ...]
    anchored: bool
    score: float


# ---------------------------------------------------------------------------
# Violations
# ---------------------------------------------------------------------------

UNKNOWN_COMPONENT = "UNKNOWN_COMPONENT"
UNKNOWN_ALERT_TYPE = "UNKNOWN_ALERT_TYPE"
NEGATIVE_TIMESTAMP = "NEGATIVE_TIMESTAMP"
EMPTY_ALERT_ID = "EMPTY_ALERT_ID"
MULTIPLE_EXTERNAL = "MULTIPLE_EXTERNAL"
MISSING_EXTERNAL = "MISSING_EXTERNAL"
EMPTY_EVENT_LIST = "EMPTY_EVENT_LIST"
EMPTY_SOURCES = "EMPTY_SOURCES"
EMPTY_TARGETS = "EMPTY_TARGETS"
DUPLICATE_ID = "DUPLICATE_ID"
DANGLING_REFERENCE = "DANGLING_REFERENCE"
UNKNOWN_TACTIC = "UNKNOWN_TACTIC"
BAD_ID_FORMAT = "BAD_ID_FORMAT"
BAD_TAXONOMY = "BAD_TAXONOMY"


@dataclass(frozen=True)
class Violation:
    """A single data problem; violations are data, not failures."""

    code: str
    message: str
    path: str = ""

    def render(self) -> str:
        if self.path:
            return f"{self.code}: {self.message} ({self.path})"
        return f"{self.code}: {self.message}"


def render_violations(violations: Iterable[Violation]) -> str:
    """One violation per line, in the given (stable) order."""
    return "\n".join(v.render() for v in violations)


def validate_alert(alert: Alert, catalog) -> list[Violation]:
    """Check one alert against a catalog; empty result means OK."""
    violations: list[Violation] = []
    if alert.ts < 0:
        violations.append(
            Violation(NEGATIVE_TIMESTAMP, f"timestamp {alert.ts} is negative", "ts")
        )
    if not alert.alert_id:
        violations.append(Violation(EMPTY_ALERT_ID, "alert_id is empty", "alert_id"))
    for path in ("src", "dest"):
        component = getattr(alert, path)
        if component not in catalog.components_by_id:
            violations.append(
                Violation(UNKNOWN_COMPONENT, f"unknown component {component!r}", path)
            )
    if catalog.scenario_for_alert_type(alert.alert_type) is None:
        violations.append(
            Violation(
                UNKNOWN_ALERT_TYPE,
                f"alert_type {alert.alert_type!r} matches no scenario or event",
                "alert_type",
            )
        )
    return violations


# ---------------------------------------------------------------------------
# Chain validity oracle
# ---------------------------------------------------------------------------


def sort_key(alert: Alert) -> tuple[int, str]:
    """Chronological ordering key: timestamp, then alert id."""
    return (alert.ts, alert.alert_id)


def is_valid_chain(
    chain: AttackChain,
    stream: Sequence[Alert],
    graph,
    *,
    catalog=None,
    config=None,
) -> bool:
    """Pure predicate checking every chain invariant; usable as a test oracle.

    Checks, against the chronologically sorted ``stream``:

    * length >= 2 and all alert ids present exactly once in the stream;
    * alerts appear in chronological order (positions strictly increasing);
    * consecutive pivots ``a.dest == b.src`` where ``a`` is not a self-loop
      (a self-looping alert may close a chain but cannot pivot onward);
    * every alert matches a (source-edge, target-edge) pair in ``graph``;
    * tactic indices non-decreasing (or strict / unconstrained per
      ``config``), and consistent with ``catalog`` when one is given;
    * gap, length and anchoring constraints from ``config`` when given;
    * the ``anchored`` flag agrees with the first alert's source.
    """
    if len(chain.alerts) < 2 or len(chain.tactics) != len(chain.alerts):
        return False
    by_id: dict[str, Alert] = {}
    for alert in stream:
        if alert.alert_id in by_id:
            return False
        by_id[alert.alert_id] = alert
    if any(alert_id not in by_id for alert_id in chain.alerts):
        return False

    ordered = sorted(stream, key=sort_key)
    position = {alert.alert_id: i for i, alert in enumerate(ordered)}
    positions = [position[alert_id] for alert_id in chain.alerts]
    if any(b <= a for a, b in zip(positions, positions[1:])):
        return False

    alerts = [by_id[alert_id] for alert_id in chain.alerts]
    for a, b in zip(alerts, alerts[1:]):
        if a.dest != b.src or a.src == a.dest:
            return False
        if b.ts < a.ts:
            return False

    for alert in alerts:
        if not graph.match_alert(alert).matched:
            return False

    monotonic = "NON_DECREASING"
    max_gap_ms = 0
    max_chain_len = None
    require_anchor = False
    if config is not None:
        monotonic = config.tactic_monotonic.value
        max_gap_ms = config.max_gap_ms
        max_chain_len = config.max_chain_len
        require_anchor = config.require_external_anchor

    if monotonic == "NON_DECREASING":
        if any(t2 < t1 for t1, t2 in zip(chain.tactics, chain.tactics[1:])):
            return False
    elif monotonic == "STRICT":
        if any(t2 <= t1 for t1, t2 in zip(chain.tactics, chain.tactics[1:])):
            return False
    if catalog is not None:
        expected = [catalog.tactic_of(a.alert_type).index for a in alerts]
        if list(chain.tactics) != expected:
            return False
    if max_gap_ms > 0:
        if any(b.ts - a.ts > max_gap_ms for a, b in zip(alerts, alerts[1:])):
            return False
    if max_chain_len is not None and len(alerts) > max_chain_len:
        return False

    anchored = graph.external_id is not None and alerts[0].src == graph.external_id
    if chain.anchored != anchored:
        return False
    if require_anchor and not anchored:
        return False
    return True
