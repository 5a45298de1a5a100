"""JSON Lines interchange for alert streams, chains and ground truth.

One object per line. Alerts carry exactly the fields
``ts, src, dest, alert_type, alert_id, meta``; chains carry
``alerts, tactics, anchored, score``; ground truth carries
``alert_id, label``.
"""

from __future__ import annotations

import json
from typing import Iterable

from .model import Alert, AttackChain
from .simulator import GroundTruth


class StreamFormatError(ValueError):
    """A JSONL line does not conform to the expected schema."""


def _loads(line: str, lineno: int) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise StreamFormatError(f"line {lineno}: invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise StreamFormatError(f"line {lineno}: expected an object")
    return obj


def parse_alerts(lines: Iterable[str]) -> list[Alert]:
    alerts = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        obj = _loads(line, lineno)
        try:
            alerts.append(
                Alert(
                    ts=int(obj["ts"]),
                    src=str(obj["src"]),
                    dest=str(obj["dest"]),
                    alert_type=str(obj["alert_type"]),
                    alert_id=str(obj["alert_id"]),
                    meta={str(k): str(v) for k, v in obj.get("meta", {}).items()},
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise StreamFormatError(f"line {lineno}: bad alert: {exc}") from None
    return alerts


def render_alerts(alerts: Iterable[Alert]) -> str:
    lines = []
    for alert in alerts:
        lines.append(
            json.dumps(
                {
                    "ts": alert.ts,
                    "src": alert.src,
                    "dest": alert.dest,
                    "alert_type": alert.alert_type,
                    "alert_id": alert.alert_id,
                    "meta": dict(alert.meta),
                }
            )
        )
    return "\n".join(lines) + ("\n" if lines else "")


def parse_chains(lines: Iterable[str]) -> list[AttackChain]:
    chains = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        obj = _loads(line, lineno)
        try:
            chains.append(
                AttackChain(
                    alerts=tuple(str(a) for a in obj["alerts"]),
                    tactics=tuple(int(t) for t in obj["tactics"]),
                    anchored=bool(obj["anchored"]),
                    score=float(obj["score"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise StreamFormatError(f"line {lineno}: bad chain: {exc}") from None
    return chains


def render_chains(chains: Iterable[AttackChain]) -> str:
    lines = []
    for chain in chains:
        lines.append(
            json.dumps(
                {
                    "alerts": list(chain.alerts),
                    "tactics": list(chain.tactics),
                    "anchored": chain.anchored,
                    "score": chain.score,
                }
            )
        )
    return "\n".join(lines) + ("\n" if lines else "")


def parse_truth(lines: Iterable[str]) -> GroundTruth:
    labels: dict[str, str] = {}
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        obj = _loads(line, lineno)
        try:
            labels[str(obj["alert_id"])] = str(obj["label"])
        except KeyError as exc:
            raise StreamFormatError(f"line {lineno}: bad label: {exc}") from None
    return GroundTruth(labels=labels)


def render_truth(truth: GroundTruth, alerts: Iterable[Alert]) -> str:
    """Labels in stream order, one per alert."""
    lines = [
        json.dumps({"alert_id": a.alert_id, "label": truth.labels[a.alert_id]})
        for a in alerts
    ]
    return "\n".join(lines) + ("\n" if lines else "")
