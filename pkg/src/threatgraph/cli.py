"""Command-line front door wiring all modules together.

Subcommands: ``catalog validate``, ``graph export``, ``graph paths``,
``plan``, ``simulate``, ``detect``, ``evaluate``. Every command reads the
embedded default catalog unless ``--file`` (or the ``THREATGRAPH_CATALOG``
environment variable) points at another one. Streams use ``-`` for
stdin/stdout so commands compose into pipelines.

Exit codes: 0 success, 1 validation findings, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import catalog as catalog_mod
from . import evaluation, io, planner, simulator
from .correlator import CorrelationConfig, correlate, partition_matched
from .graph import UnknownComponentError, build_graph, enumerate_paths, export_dot
from .model import render_violations, validate_alert

CATALOG_ENV = "THREATGRAPH_CATALOG"


def _load_catalog(args: argparse.Namespace) -> catalog_mod.Catalog:
    path = getattr(args, "file", None) or os.environ.get(CATALOG_ENV)
    if path:
        text = Path(path).read_text(encoding="utf-8")
        return catalog_mod.parse_catalog(text)
    return catalog_mod.default_catalog()


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _cmd_catalog_validate(args: argparse.Namespace) -> int:
    try:
        catalog = _load_catalog(args)
    except catalog_mod.CatalogError as exc:
        print(f"catalog error: {exc}", file=sys.stderr)
        return 1
    violations = catalog_mod.validate_catalog(catalog)
    if violations:
        print(render_violations(violations))
        return 1
    print(f"OK ({len(catalog.scenarios)} scenarios, 0 violations)")
    return 0


def _cmd_graph_export(args: argparse.Namespace) -> int:
    graph = build_graph(_load_catalog(args))
    _write_text(args.dot, export_dot(graph))
    return 0


def _cmd_graph_paths(args: argparse.Namespace) -> int:
    graph = build_graph(_load_catalog(args))
    try:
        paths = enumerate_paths(graph, args.start, args.max_steps)
    except UnknownComponentError:
        print(f"unknown component: {args.start}", file=sys.stderr)
        return 2
    for path in paths:
        print(path.render())
    return 0


def _cmd_plan(args: argparse.Namespace) -> int:
    catalog = _load_catalog(args)
    graph = build_graph(catalog)
    plan = planner.derive_plan(graph, catalog)
    sys.stdout.write(planner.render_plan(plan, args.format))
    return 0


def _parse_campaign(spec: str) -> tuple[str, int]:
    template_id, sep, start = spec.partition("@")
    if not sep or not template_id:
        raise argparse.ArgumentTypeError(
            f"campaign must look like TEMPLATE_ID@START_MS, got {spec!r}"
        )
    try:
        return template_id, int(start)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad campaign start time in {spec!r}") from None


def _cmd_simulate(args: argparse.Namespace) -> int:
    catalog = _load_catalog(args)
    graph = build_graph(catalog)
    cfg = simulator.SimConfig(
        seed=args.seed,
        duration_ms=args.duration,
        noise_rate=args.noise_rate,
        campaigns=tuple(args.campaign or ()),
        noise_model=simulator.NoiseModel(args.noise_model),
    )
    try:
        alerts, truth = simulator.generate_stream(cfg, catalog, graph)
    except simulator.SimulationError as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return 2
    _write_text(args.out, io.render_alerts(alerts))
    if args.truth:
        _write_text(args.truth, io.render_truth(truth, alerts))
    return 0


def _cmd_detect(args: argparse.Namespace) -> int:
    catalog = _load_catalog(args)
    graph = build_graph(catalog)
    config = CorrelationConfig()
    if args.config:
        config = CorrelationConfig.from_dict(json.loads(_read_text(args.config)))
    alerts = io.parse_alerts(_read_text(args.stream).splitlines())
    valid = []
    invalid = 0
    for alert in alerts:
        if validate_alert(alert, catalog):
            invalid += 1
        else:
            valid.append(alert)
    chains = correlate(valid, graph, catalog, config)
    _write_text(args.out, io.render_chains(chains))
    _, unmatched = partition_matched(valid, graph)
    print(
        f"{len(chains)} chains from {len(valid)} alerts "
        f"({invalid} invalid, {len(unmatched)} unmatched dropped)",
        file=sys.stderr,
    )
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    stream = io.parse_alerts(_read_text(args.stream).splitlines())
    truth = io.parse_truth(_read_text(args.truth).splitlines())
    chains = io.parse_chains(_read_text(args.chains).splitlines())
    try:
        report = evaluation.evaluate(chains, truth, stream)
    except (evaluation.DanglingAlertRefError, ValueError) as exc:
        print(f"evaluation error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(
        evaluation.render_report(report, "json" if args.json else "text")
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="threatgraph",
        description="Threat-graph modelling and multi-stage attack detection "
        "for the 5G core network",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_catalog_arg(p: argparse.ArgumentParser) -> None:
        p.add_argument("--file", help="catalog file (default: embedded catalog)")

    p_catalog = sub.add_parser("catalog", help="catalog operations")
    catalog_sub = p_catalog.add_subparsers(dest="subcommand", required=True)
    p = catalog_sub.add_parser("validate", help="validate a catalog")
    add_catalog_arg(p)
    p.set_defaults(func=_cmd_catalog_validate)

    p_graph = sub.add_parser("graph", help="threat graph operations")
    graph_sub = p_graph.add_subparsers(dest="subcommand", required=True)
    p = graph_sub.add_parser("export", help="export the graph as DOT")
    add_catalog_arg(p)
    p.add_argument("--dot", required=True, help="output path (- for stdout)")
    p.set_defaults(func=_cmd_graph_export)
    p = graph_sub.add_parser("paths", help="enumerate attack paths")
    add_catalog_arg(p)
    p.add_argument("--start", default="EXTERNAL", help="start component id")
    p.add_argument("--max-steps", type=int, default=3, dest="max_steps")
    p.set_defaults(func=_cmd_graph_paths)

    p = sub.add_parser("plan", help="derive the monitoring plan")
    add_catalog_arg(p)
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("simulate", help="generate a labelled synthetic stream")
    add_catalog_arg(p)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--duration", type=int, required=True, help="duration in ms")
    p.add_argument("--noise-rate", type=float, default=0.0, dest="noise_rate",
                   help="noise alerts per second")
    p.add_argument("--noise-model", choices=("UNIFORM_VALID", "UNIFORM_ANY"),
                   default="UNIFORM_VALID", dest="noise_model")
    p.add_argument("--campaign", action="append", type=_parse_campaign,
                   metavar="ID@T", help="schedule a campaign (repeatable)")
    p.add_argument("--out", default="-", help="stream output (- for stdout)")
    p.add_argument("--truth", help="ground truth output path")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("detect", help="correlate a stream into attack chains")
    add_catalog_arg(p)
    p.add_argument("--stream", default="-", help="alert stream (- for stdin)")
    p.add_argument("--config", help="correlation config JSON file")
    p.add_argument("--out", default="-", help="chains output (- for stdout)")
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("evaluate", help="score chains against ground truth")
    add_catalog_arg(p)
    p.add_argument("--stream", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--chains", required=True)
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.set_defaults(func=_cmd_evaluate)
    return parser


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except catalog_mod.CatalogError as exc:
        print(f"catalog error: {exc}", file=sys.stderr)
        return 2
    except io.StreamFormatError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
