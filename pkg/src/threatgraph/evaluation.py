"""Detection scoring against ground truth: precision/recall at two levels.

Chain level treats each emitted chain as a detection: a chain is a true
positive when it contains at least two alerts of one campaign in campaign
order (a single matched alert is not correlation). A campaign counts as
detected when some chain evidences it. Alert level scores membership:
campaign alerts inside any chain are true positives, noise alerts inside
any chain are false positives.

Rates are exact rationals; an empty denominator yields 1.0 and the rate
name is recorded in ``degenerate``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .model import Alert, AttackChain, sort_key
from .simulator import NOISE_LABEL, GroundTruth


class DanglingAlertRefError(KeyError):
    """A chain references an alert id absent from the stream."""


@dataclass(frozen=True)
class Counts:
    tp: int
    fp: int
    fn: int


@dataclass(frozen=True)
class EvalReport:
    chain_recall: Fraction
    chain_precision: Fraction
    alert_recall: Fraction
    alert_precision: Fraction
    per_campaign: Mapping[str, bool]
    chain_counts: Counts
    alert_counts: Counts
    degenerate: tuple[str, ...]


def _rate(numerator: int, denominator: int, name: str, degenerate: list[str]) -> Fraction:
    if denominator == 0:
        degenerate.append(name)
        return Fraction(1)
    return Fraction(numerator, denominator)


def _is_subsequence(needle: Sequence[str], haystack: Sequence[str]) -> bool:
    it = iter(haystack)
    return all(any(x == y for y in it) for x in needle)


def evaluate(
    chains: Sequence[AttackChain],
    truth: GroundTruth,
    stream: Sequence[Alert],
) -> EvalReport:
    """Score emitted chains against the labelled stream. Pure and deterministic."""
    by_id = {alert.alert_id: alert for alert in stream}
    for chain in chains:
        for alert_id in chain.alerts:
            if alert_id not in by_id:
                raise DanglingAlertRefError(alert_id)
    for alert in stream:
        if alert.alert_id not in truth.labels:
            raise ValueError(f"alert {alert.alert_id!r} has no ground-truth label")

    ordered_ids = [a.alert_id for a in sorted(stream, key=sort_key)]
    campaign_sequence: dict[str, list[str]] = {}
    for alert_id in ordered_ids:
        label = truth.labels[alert_id]
        if label != NOISE_LABEL:
            campaign_sequence.setdefault(label, []).append(alert_id)

    detected: set[str] = set()
    chain_tp = 0
    for chain in chains:
        evidences = False
        for label, sequence in campaign_sequence.items():
            members = [a for a in chain.alerts if truth.labels[a] == label]
            if len(members) >= 2 and _is_subsequence(members, sequence):
                detected.add(label)
                evidences = True
        chain_tp += 1 if evidences else 0
    chain_fp = len(chains) - chain_tp
    chain_fn = len(campaign_sequence) - len(detected)

    in_chain = {alert_id for chain in chains for alert_id in chain.alerts}
    campaign_alerts = {
        alert_id for alert_id, label in truth.labels.items() if label != NOISE_LABEL
    }
    alert_tp = len(campaign_alerts & in_chain)
    alert_fp = len(in_chain - campaign_alerts)
    alert_fn = len(campaign_alerts - in_chain)

    degenerate: list[str] = []
    report = EvalReport(
        chain_recall=_rate(
            len(detected), len(campaign_sequence), "chain_recall", degenerate
        ),
        chain_precision=_rate(chain_tp, len(chains), "chain_precision", degenerate),
        alert_recall=_rate(alert_tp, alert_tp + alert_fn, "alert_recall", degenerate),
        alert_precision=_rate(
            alert_tp, alert_tp + alert_fp, "alert_precision", degenerate
        ),
        per_campaign={
            label: label in detected for label in sorted(campaign_sequence)
        },
        chain_counts=Counts(tp=chain_tp, fp=chain_fp, fn=chain_fn),
        alert_counts=Counts(tp=alert_tp, fp=alert_fp, fn=alert_fn),
        degenerate=tuple(degenerate),
    )
    return report


def render_report(report: EvalReport, format: str = "text") -> str:
    """Human text or machine JSON rendering; both deterministic."""
    rates = (
        ("chain_recall", report.chain_recall),
        ("chain_precision", report.chain_precision),
        ("alert_recall", report.alert_recall),
        ("alert_precision", report.alert_precision),
    )
    fmt = format.lower()
    if fmt == "json":
        doc = {
            name: {
                "num": value.numerator,
                "den": value.denominator,
                "value": float(value),
            }
            for name, value in rates
        }
        doc["per_campaign"] = dict(report.per_campaign)
        doc["counts"] = {
            "chain": vars(report.chain_counts).copy(),
            "alert": vars(report.alert_counts).copy(),
        }
        doc["degenerate"] = list(report.degenerate)
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if fmt == "text":
        lines = [
            f"{name:<16} {value.numerator}/{value.denominator} ({float(value):.6f})"
            for name, value in rates
        ]
        for label, hit in report.per_campaign.items():
            lines.append(f"campaign {label}: {'detected' if hit else 'missed'}")
        lines.append(
            "counts: chains tp={0.tp} fp={0.fp} fn={0.fn}; "
            "alerts tp={1.tp} fp={1.fp} fn={1.fn}".format(
                report.chain_counts, report.alert_counts
            )
        )
        if report.degenerate:
            lines.append("degenerate rates: " + ", ".join(report.degenerate))
        return "\n".join(lines) + "\n"
    raise ValueError(f"unsupported report format: {format!r}")
