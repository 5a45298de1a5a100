"""Seeded synthetic alert streams: scripted campaigns plus background noise.

Streams interleave campaign alerts (instantiated from step templates, two
built in) with false-positive noise, and come with per-alert ground-truth
labels. Generation is fully deterministic for a given configuration:
randomness uses the counter-based Philox4x64 generator with one substream
per purpose (noise, each scheduled campaign), keyed by (seed, substream
tag), so adding a campaign never perturbs the noise sequence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .catalog import Catalog
from .graph import ThreatGraph, UnknownAlertTypeError
from .model import Alert

NOISE_LABEL = "NOISE"

# Substream tags; campaign k uses _CAMPAIGN_TAG_BASE + k.
_NOISE_TAG = 0
_CAMPAIGN_TAG_BASE = 1


class SimulationError(Exception):
    """Base class for stream generation failures."""


class UnknownTemplateError(SimulationError):
    """A scheduled campaign references no known template."""


class TemplateValidationError(SimulationError):
    """A template step does not match the threat graph."""


class InvalidConfigError(SimulationError):
    """The simulation configuration is out of range."""


class NoiseModel(Enum):
    UNIFORM_VALID = "UNIFORM_VALID"
    UNIFORM_ANY = "UNIFORM_ANY"


@dataclass(frozen=True)
class CampaignStep:
    """One scripted alert: endpoints, type and delay range after the previous step."""

    src: str
    dest: str
    alert_type: str
    delay_ms: tuple[int, int]


@dataclass(frozen=True)
class CampaignTemplate:
    id: str
    steps: tuple[CampaignStep, ...]
    description: str = ""


@dataclass(frozen=True)
class SimConfig:
    seed: int
    duration_ms: int
    noise_rate: float = 0.0
    campaigns: tuple[tuple[str, int], ...] = ()
    noise_model: NoiseModel = NoiseModel.UNIFORM_VALID


@dataclass(frozen=True)
class GroundTruth:
    """Total labelling: every generated alert id maps to a campaign or NOISE."""

    labels: Mapping[str, str]

    def campaign_ids(self) -> tuple[str, ...]:
        return tuple(sorted({v for v in self.labels.values() if v != NOISE_LABEL}))

    def is_noise(self, alert_id: str) -> bool:
        return self.labels[alert_id] == NOISE_LABEL


def builtin_templates() -> list[CampaignTemplate]:
    """The two built-in multi-stage campaigns.

    SCENARIO_1: an attacker gains credentials for the orchestration layer,
    pushes a configuration change introducing a malicious NF, and that NF
    starts eavesdropping the service mesh. SCENARIO_2: an attacker exploits
    the public API of the NEF, establishes a remote connection, breaks out
    of the hypervisor onto the physical infrastructure and reads NF data
    from host memory.
    """
    return [
        CampaignTemplate(
            id="SCENARIO_1",
            steps=(
                CampaignStep("EXTERNAL", "MANO", "CREDENTIAL_COMPROMISE_MANO", (0, 0)),
                CampaignStep("MANO", "NF1", "CONFIG_MODIFICATION", (500, 5000)),
                CampaignStep("NF1", "NF2", "EAVESDROP_SBI", (500, 5000)),
            ),
            description="Orchestration takeover via stolen credentials, then "
            "malicious NF introduction and service-mesh eavesdropping",
        ),
        CampaignTemplate(
            id="SCENARIO_2",
            steps=(
                CampaignStep("EXTERNAL", "NEF", "API_EXPLOIT", (0, 0)),
                CampaignStep("EXTERNAL", "NEF", "REMOTE_CONNECTION", (500, 5000)),
                CampaignStep("NEF", "PI", "HYPERVISOR_EXPLOIT", (500, 5000)),
                CampaignStep("PI", "NF1", "DATA_ACCESS_NF", (500, 5000)),
            ),
            description="API exploit of the NEF, remote connection, hypervisor "
            "escape to the physical infrastructure, NF data access",
        ),
    ]


def validate_template(template: CampaignTemplate, graph: ThreatGraph) -> list[str]:
    """Problems with a template; each step must match the graph when instantiated."""
    problems: list[str] = []
    for k, step in enumerate(template.steps):
        lo, hi = step.delay_ms
        if lo < 0 or hi < lo:
            problems.append(f"{template.id} step {k}: bad delay range {step.delay_ms}")
        probe = Alert(
            ts=0, src=step.src, dest=step.dest,
            alert_type=step.alert_type, alert_id="probe",
        )
        try:
            result = graph.match_alert(probe)
        except UnknownAlertTypeError:
            problems.append(
                f"{template.id} step {k}: unknown alert type {step.alert_type!r}"
            )
            continue
        if not result.matched:
            problems.append(
                f"{template.id} step {k}: "
                f"{step.src}->{step.dest} {step.alert_type} does not match the graph"
            )
    return problems


def _substream(seed: int, tag: int) -> np.random.Generator:
    key = np.array([seed, tag], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _valid_triples(catalog: Catalog) -> list[tuple[str, str, tuple[str, ...]]]:
    """All (src, dest, alert-type choices) triples the graph matches, sorted."""
    triples: list[tuple[str, str, tuple[str, ...]]] = []
    for scenario in sorted(catalog.scenarios, key=lambda s: s.id):
        types = (scenario.id,) + tuple(e.id for e in scenario.events)
        for src in catalog.expand_refs(scenario.sources):
            for dest in catalog.expand_refs(scenario.targets):
                triples.append((src, dest, types))
    return triples


def generate_stream(
    cfg: SimConfig,
    catalog: Catalog,
    graph: ThreatGraph,
    templates: Sequence[CampaignTemplate] | None = None,
) -> tuple[list[Alert], GroundTruth]:
    """Generate a labelled alert stream, sorted by timestamp.

    Campaign alerts instantiate their template steps with delays drawn from
    the stated ranges; noise arrivals follow a Poisson process at
    ``noise_rate`` alerts per second across ``duration_ms``. UNIFORM_VALID
    noise draws only graph-matched triples; UNIFORM_ANY draws any
    catalog-valid triple, matched or not.
    """
    if cfg.duration_ms <= 0:
        raise InvalidConfigError("duration_ms must be > 0")
    if cfg.noise_rate < 0:
        raise InvalidConfigError("noise_rate must be >= 0")
    if not 0 <= cfg.seed < 2**64:
        raise InvalidConfigError("seed must be an unsigned 64-bit integer")

    by_id = {t.id: t for t in builtin_templates()}
    for extra in templates or ():
        by_id[extra.id] = extra
    for template in by_id.values():
        problems = validate_template(template, graph)
        if problems:
            raise TemplateValidationError("; ".join(problems))

    label_count: dict[str, int] = {}
    # (ts, generation order) -> (src, dest, alert_type, label)
    staged: list[tuple[int, int, str, str, str, str]] = []
    order = 0

    for k, (template_id, start_ms) in enumerate(cfg.campaigns):
        if template_id not in by_id:
            raise UnknownTemplateError(template_id)
        if start_ms < 0:
            raise InvalidConfigError(f"campaign start must be >= 0, got {start_ms}")
        occurrence = label_count.get(template_id, 0)
        label_count[template_id] = occurrence + 1
        label = template_id if occurrence == 0 else f"{template_id}#{occurrence}"
        rng = _substream(cfg.seed, _CAMPAIGN_TAG_BASE + k)
        t = start_ms
        for step in by_id[template_id].steps:
            lo, hi = step.delay_ms
            t += int(rng.integers(lo, hi + 1))
            staged.append((t, order, step.src, step.dest, step.alert_type, label))
            order += 1

    rng = _substream(cfg.seed, _NOISE_TAG)
    lam = cfg.noise_rate * cfg.duration_ms / 1000.0
    count = int(rng.poisson(lam)) if lam > 0 else 0
    times = np.sort(rng.integers(0, cfg.duration_ms, size=count))
    if cfg.noise_model is NoiseModel.UNIFORM_VALID:
        triples = _valid_triples(catalog)
        for ts in times:
            src, dest, types = triples[int(rng.integers(0, len(triples)))]
            alert_type = types[int(rng.integers(0, len(types)))]
            staged.append((int(ts), order, src, dest, alert_type, NOISE_LABEL))
            order += 1
    else:
        components = tuple(c.id for c in catalog.components)
        all_types: list[str] = []
        for scenario in sorted(catalog.scenarios, key=lambda s: s.id):
            all_types.append(scenario.id)
            all_types.extend(e.id for e in scenario.events)
        for ts in times:
            src = components[int(rng.integers(0, len(components)))]
            dest = components[int(rng.integers(0, len(components)))]
            alert_type = all_types[int(rng.integers(0, len(all_types)))]
            staged.append((int(ts), order, src, dest, alert_type, NOISE_LABEL))
            order += 1

    staged.sort(key=lambda item: (item[0], item[1]))
    alerts: list[Alert] = []
    labels: dict[str, str] = {}
    for k, (ts, _, src, dest, alert_type, label) in enumerate(staged):
        alert_id = f"A{k:06d}"
        alerts.append(
            Alert(ts=ts, src=src, dest=dest, alert_type=alert_type, alert_id=alert_id)
        )
        labels[alert_id] = label
    return alerts, GroundTruth(labels=labels)
