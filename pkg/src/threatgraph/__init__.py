"""Threat-graph modelling and multi-stage attack detection for the 5G core.

The library models decomposed threat scenarios as a bipartite directed
graph over infrastructure components, derives monitoring placement plans,
correlates timestamped security alerts into candidate attack chains, and
ships a seeded scenario simulator plus an evaluation harness.
"""

from ._kernel import BACKEND as KERNEL_BACKEND
from .catalog import (
    Catalog,
    CatalogError,
    CatalogSyntaxError,
    DuplicateIdError,
    ResolutionError,
    default_catalog,
    parse_catalog,
    serialize_catalog,
    validate_catalog,
)
from .correlator import (
    CorrelationConfig,
    EmitPolicy,
    TacticMonotonic,
    assign_tactic,
    correlate,
    partition_matched,
    score_chain,
    sort_alerts,
)
from .evaluation import EvalReport, evaluate, render_report
from .graph import (
    AttackPath,
    MatchResult,
    ThreatGraph,
    UnknownAlertTypeError,
    UnknownComponentError,
    build_graph,
    enumerate_paths,
    export_dot,
    match_alert,
)
from .model import (
    Alert,
    AttackChain,
    Component,
    ComponentKind,
    MonitoringRequirement,
    Placement,
    Sensor,
    TacticStage,
    ThreatEvent,
    ThreatScenario,
    Violation,
    is_valid_chain,
    render_violations,
    validate_alert,
)
from .planner import MonitoringPlan, PlanEntry, derive_plan, render_plan
from .simulator import (
    NOISE_LABEL,
    CampaignStep,
    CampaignTemplate,
    GroundTruth,
    NoiseModel,
    SimConfig,
    builtin_templates,
    generate_stream,
)

__version__ = "0.1.0"
