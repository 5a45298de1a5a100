"""Multi-stage attack detection over security alert streams.

Correlation proceeds in three stages:

1. **Chronology** — alerts are sorted by (timestamp, alert id).
2. **Tactic** — each alert is mapped to its kill-chain stage; event-level
   alert types use the event's tactic, scenario-level types the earliest
   tactic among the scenario's events.
3. **Infrastructure** — alerts are chained along the pivot rule: a
   component targeted by one alert later appears as the source of the
   next, with every alert matched against the threat graph.

Alerts the graph cannot match are dropped before chaining and can be
inspected via :func:`partition_matched`. Chain search itself runs in the
compiled kernel when available (see :mod:`threatgraph._kernel`).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from . import _kernel
from .catalog import Catalog
from .graph import ThreatGraph, UnknownAlertTypeError
from .model import Alert, AttackChain, TacticStage, sort_key


class TacticMonotonic(Enum):
    STRICT = "STRICT"
    NON_DECREASING = "NON_DECREASING"
    OFF = "OFF"


class EmitPolicy(Enum):
    MAXIMAL_ONLY = "MAXIMAL_ONLY"
    ALL = "ALL"


_TACTIC_MODE = {
    TacticMonotonic.OFF: 0,
    TacticMonotonic.NON_DECREASING: 1,
    TacticMonotonic.STRICT: 2,
}


@dataclass(frozen=True)
class CorrelationConfig:
    """Knobs for the chaining semantics.

    ``max_gap_ms`` bounds the time between consecutive chain alerts
    (0 = unlimited, the default: long-running campaigns span months).
    ``emit`` defaults to maximal chains only, since sub-chains are implied
    by their maximal chain and only add alert fatigue.
    """

    max_gap_ms: int = 0
    require_external_anchor: bool = False
    tactic_monotonic: TacticMonotonic = TacticMonotonic.NON_DECREASING
    max_chain_len: int = 8
    emit: EmitPolicy = EmitPolicy.MAXIMAL_ONLY

    def __post_init__(self) -> None:
        if self.max_chain_len < 2:
            raise ValueError("max_chain_len must be >= 2")
        if self.max_gap_ms < 0:
            raise ValueError("max_gap_ms must be >= 0")

    @classmethod
    def from_dict(cls, data: dict) -> "CorrelationConfig":
        kwargs: dict = {}
        if "max_gap_ms" in data:
            kwargs["max_gap_ms"] = int(data["max_gap_ms"])
        if "require_external_anchor" in data:
            kwargs["require_external_anchor"] = bool(data["require_external_anchor"])
        if "tactic_monotonic" in data:
            kwargs["tactic_monotonic"] = TacticMonotonic(data["tactic_monotonic"])
        if "max_chain_len" in data:
            kwargs["max_chain_len"] = int(data["max_chain_len"])
        if "emit" in data:
            kwargs["emit"] = EmitPolicy(data["emit"])
        unknown = set(data) - {
            "max_gap_ms",
            "require_external_anchor",
            "tactic_monotonic",
            "max_chain_len",
            "emit",
        }
        if unknown:
            raise ValueError(f"unknown correlation config keys: {sorted(unknown)}")
        return cls(**kwargs)


def sort_alerts(stream: Sequence[Alert]) -> list[Alert]:
    """Chronological order: by timestamp, alert id breaking ties."""
    return sorted(stream, key=sort_key)


def assign_tactic(alert: Alert, catalog: Catalog) -> TacticStage:
    """Kill-chain stage of one alert (earliest stage for scenario-level types)."""
    try:
        return catalog.tactic_of(alert.alert_type)
    except KeyError:
        raise UnknownAlertTypeError(alert.alert_type) from None


def partition_matched(
    stream: Sequence[Alert], graph: ThreatGraph
) -> tuple[list[Alert], list[Alert]]:
    """Split a sorted copy of the stream into graph-matched and unmatched alerts."""
    matched: list[Alert] = []
    unmatched: list[Alert] = []
    for alert in sort_alerts(stream):
        try:
            result = graph.match_alert(alert)
        except UnknownAlertTypeError:
            unmatched.append(alert)
            continue
        (matched if result.matched else unmatched).append(alert)
    return matched, unmatched


def score_chain(chain: AttackChain) -> float:
    """Length plus a small anchoring bonus; monotone in chain length."""
    return float(len(chain.alerts)) + (0.5 if chain.anchored else 0.0)


def correlate(
    stream: Sequence[Alert],
    graph: ThreatGraph,
    catalog: Catalog,
    config: CorrelationConfig | None = None,
) -> list[AttackChain]:
    """All attack chains in the stream, per the configured semantics.

    Output is deterministic: chains are ordered by their alert positions in
    the sorted stream. Shuffling the input never changes the result.
    """
    cfg = config or CorrelationConfig()
    matched, _ = partition_matched(stream, graph)
    if len(matched) < 2:
        return []

    component_index = {cid: k for k, cid in enumerate(graph.component_ids)}
    n = len(matched)
    src = np.empty(n, dtype=np.int64)
    dest = np.empty(n, dtype=np.int64)
    ts = np.empty(n, dtype=np.int64)
    tactic = np.empty(n, dtype=np.int64)
    for k, alert in enumerate(matched):
        src[k] = component_index[alert.src]
        dest[k] = component_index[alert.dest]
        ts[k] = alert.ts
        tactic[k] = catalog.tactic_of(alert.alert_type).index

    external_idx = component_index.get(graph.external_id or "", -1)
    emit_mode = (
        _kernel.EMIT_ALL
        if cfg.emit is EmitPolicy.ALL
        else _kernel.EMIT_UNEXTENDABLE
    )
    chains = _kernel.find_chains(
        src,
        dest,
        ts,
        tactic,
        cfg.max_gap_ms,
        _TACTIC_MODE[cfg.tactic_monotonic],
        cfg.max_chain_len,
        cfg.require_external_anchor,
        external_idx,
        emit_mode,
    )
    if cfg.emit is EmitPolicy.MAXIMAL_ONLY:
        chains = _kernel.filter_maximal(chains)

    out: list[AttackChain] = []
    for indices in sorted(chains):
        alerts = tuple(matched[i].alert_id for i in indices)
        tactics = tuple(int(tactic[i]) for i in indices)
        anchored = (
            graph.external_id is not None
            and matched[indices[0]].src == graph.external_id
        )
        score = float(len(indices)) + (0.5 if anchored else 0.0)
        out.append(
            AttackChain(alerts=alerts, tactics=tactics, anchored=anchored, score=score)
        )
    return out
