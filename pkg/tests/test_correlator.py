from __future__ import annotations

import random

import numpy as np
import pytest

from threatgraph import (
    AttackChain,
    CorrelationConfig,
    EmitPolicy,
    TacticMonotonic,
    assign_tactic,
    correlate,
    is_valid_chain,
    partition_matched,
    score_chain,
    sort_alerts,
)
from threatgraph._kernel import chain_py
from threatgraph.graph import UnknownAlertTypeError

from conftest import make_alert
from oracles import oracle_chains


def scenario1_stream():
    return [
        make_alert(1, "EXTERNAL", "MANO", "CREDENTIAL_COMPROMISE_MANO", "a1"),
        make_alert(2, "MANO", "NF1", "CONFIG_MODIFICATION", "a2"),
        make_alert(3, "NF1", "NF2", "EAVESDROP_SBI", "a3"),
    ]


def scenario2_stream():
    return [
        make_alert(1, "EXTERNAL", "NEF", "API_EXPLOIT", "b1"),
        make_alert(2, "EXTERNAL", "NEF", "REMOTE_CONNECTION", "b2"),
        make_alert(3, "NEF", "PI", "HYPERVISOR_EXPLOIT", "b3"),
        make_alert(4, "PI", "NF1", "DATA_ACCESS_NF", "b4"),
    ]


def random_stream(rng, catalog, graph, size):
    """Mixed stream: known components/types, matched and unmatched combos."""
    components = list(graph.component_ids)
    types = [s.id for s in catalog.scenarios]
    types += [e.id for s in catalog.scenarios for e in s.events]
    alerts = []
    for k in range(size):
        src = rng.choice(components)
        dest = src if rng.random() < 0.15 else rng.choice(components)
        alerts.append(
            make_alert(rng.randint(0, 40), src, dest, rng.choice(types), f"r{k:03d}")
        )
    return alerts


def random_config(rng):
    return CorrelationConfig(
        max_gap_ms=rng.choice([0, 0, 5, 15]),
        require_external_anchor=rng.random() < 0.3,
        tactic_monotonic=rng.choice(list(TacticMonotonic)),
        max_chain_len=rng.choice([2, 3, 4, 6, 12]),
        emit=rng.choice(list(EmitPolicy)),
    )


class TestSortAlerts:
    def test_empty(self):
        assert sort_alerts([]) == []

    def test_orders_by_timestamp(self):
        alerts = [
            make_alert(30, "EXTERNAL", "NEF", "API_EXPLOIT", "x"),
            make_alert(10, "EXTERNAL", "NEF", "API_EXPLOIT", "y"),
            make_alert(20, "EXTERNAL", "NEF", "API_EXPLOIT", "z"),
        ]
        assert [a.ts for a in sort_alerts(alerts)] == [10, 20, 30]

    def test_equal_timestamps_keep_alert_id_order(self):
        alerts = [
            make_alert(5, "EXTERNAL", "NEF", "API_EXPLOIT", "b"),
            make_alert(5, "EXTERNAL", "NEF", "API_EXPLOIT", "a"),
        ]
        assert [a.alert_id for a in sort_alerts(alerts)] == ["a", "b"]


class TestAssignTactic:
    def test_event_level_uses_event_tactic(self, catalog):
        alert = make_alert(0, "EXTERNAL", "NEF", "SQL_INJECTION", "a")
        assert assign_tactic(alert, catalog).index == 0

    def test_scenario_level_uses_minimum_stage(self, catalog):
        alert = make_alert(0, "EXTERNAL", "NEF", "API_EXPLOIT", "a")
        scenario = catalog.scenarios_by_id["API_EXPLOIT"]
        stages = [catalog.stages_by_name[e.tactic].index for e in scenario.events]
        assert assign_tactic(alert, catalog).index == min(stages)

    def test_unknown_type_raises(self, catalog):
        alert = make_alert(0, "EXTERNAL", "NEF", "XYZ", "a")
        with pytest.raises(UnknownAlertTypeError):
            assign_tactic(alert, catalog)


class TestScoreChain:
    def test_three_alert_anchored(self):
        chain = AttackChain(("a", "b", "c"), (0, 1, 2), True, 0.0)
        assert score_chain(chain) == 3.5

    def test_two_alert_unanchored(self):
        chain = AttackChain(("a", "b"), (0, 1), False, 0.0)
        assert score_chain(chain) == 2.0

    def test_longer_chain_scores_at_least_its_prefix(self):
        for anchored in (False, True):
            prev = 0.0
            for length in range(2, 8):
                chain = AttackChain(
                    tuple(f"a{i}" for i in range(length)),
                    tuple(range(length)),
                    anchored,
                    0.0,
                )
                assert score_chain(chain) >= prev
                prev = score_chain(chain)


class TestCorrelate:
    def test_empty_stream(self, catalog, graph):
        assert correlate([], graph, catalog) == []

    def test_scenario1_single_maximal_anchored_chain(self, catalog, graph):
        chains = correlate(scenario1_stream(), graph, catalog)
        assert len(chains) == 1
        chain = chains[0]
        assert chain.alerts == ("a1", "a2", "a3")
        assert chain.anchored
        assert chain.score == 3.5
        assert list(chain.tactics) == sorted(chain.tactics)

    def test_scenario2_chain_ends_at_nf(self, catalog, graph):
        chains = correlate(scenario2_stream(), graph, catalog)
        assert len(chains) == 1
        chain = chains[0]
        assert len(chain.alerts) >= 3
        assert chain.alerts[-1] == "b4"
        assert chain.anchored

    def test_emitted_chains_pass_validity_oracle(self, catalog, graph):
        rng = random.Random(5)
        for _ in range(25):
            stream = random_stream(rng, catalog, graph, rng.randint(0, 10))
            cfg = random_config(rng)
            for chain in correlate(stream, graph, catalog, cfg):
                assert is_valid_chain(
                    chain, stream, graph, catalog=catalog, config=cfg
                )

    def test_permutation_robustness(self, catalog, graph):
        rng = random.Random(6)
        stream = random_stream(rng, catalog, graph, 10)
        baseline = correlate(stream, graph, catalog)
        for _ in range(5):
            shuffled = stream[:]
            rng.shuffle(shuffled)
            assert correlate(shuffled, graph, catalog) == baseline

    def test_maximal_only_has_no_contained_chain(self, catalog, graph):
        rng = random.Random(7)
        stream = random_stream(rng, catalog, graph, 12)
        chains = correlate(stream, graph, catalog)
        for chain in chains:
            for other in chains:
                if chain is other:
                    continue
                it = iter(other.alerts)
                contained = all(any(x == y for y in it) for x in chain.alerts)
                assert not contained

    def test_dropping_unmatched_changes_nothing(self, catalog, graph):
        rng = random.Random(8)
        stream = random_stream(rng, catalog, graph, 12)
        matched, unmatched = partition_matched(stream, graph)
        assert correlate(stream, graph, catalog) == correlate(
            matched, graph, catalog
        )
        assert len(matched) + len(unmatched) == len(stream)

    def test_self_loop_terminates_but_never_pivots(self, catalog, graph):
        stream = [
            make_alert(1, "EXTERNAL", "MANO", "CREDENTIAL_COMPROMISE_MANO", "a1"),
            make_alert(2, "MANO", "NF1", "CONFIG_MODIFICATION", "a2"),
            make_alert(3, "NF1", "NF1", "EAVESDROP_SBI", "a3"),
            make_alert(4, "NF1", "NF2", "EAVESDROP_SBI", "a4"),
        ]
        chains = correlate(stream, graph, catalog)
        for chain in chains:
            position = chain.alerts.index("a3") if "a3" in chain.alerts else None
            if position is not None:
                assert position == len(chain.alerts) - 1
        assert any(chain.alerts == ("a1", "a2", "a3") for chain in chains)
        assert any(chain.alerts == ("a1", "a2", "a4") for chain in chains)

    def test_max_gap_splits_chains(self, catalog, graph):
        stream = scenario1_stream()
        stream[2] = make_alert(5000, "NF1", "NF2", "EAVESDROP_SBI", "a3")
        cfg = CorrelationConfig(max_gap_ms=100)
        chains = correlate(stream, graph, catalog, cfg)
        assert all("a3" not in chain.alerts for chain in chains)

    def test_require_external_anchor(self, catalog, graph):
        stream = scenario1_stream()
        cfg = CorrelationConfig(require_external_anchor=True)
        chains = correlate(stream, graph, catalog, cfg)
        assert chains and all(chain.anchored for chain in chains)
        tail_only = stream[1:]
        assert correlate(tail_only, graph, catalog, cfg) == []

    def test_emit_all_includes_subchains(self, catalog, graph):
        cfg = CorrelationConfig(emit=EmitPolicy.ALL)
        chains = correlate(scenario1_stream(), graph, catalog, cfg)
        alert_tuples = {chain.alerts for chain in chains}
        assert alert_tuples == {("a1", "a2"), ("a2", "a3"), ("a1", "a2", "a3")}

    def test_invalid_config_rejected(self):
        with pytest.raises(ValueError):
            CorrelationConfig(max_chain_len=1)
        with pytest.raises(ValueError):
            CorrelationConfig(max_gap_ms=-1)

    def test_matches_subsequence_oracle(self, catalog, graph):
        rng = random.Random(99)
        for _ in range(40):
            stream = random_stream(rng, catalog, graph, rng.randint(0, 12))
            cfg = random_config(rng)
            assert correlate(stream, graph, catalog, cfg) == oracle_chains(
                stream, graph, catalog, cfg
            )


class TestKernelParity:
    """Compiled and pure-Python kernels must agree call for call."""

    def test_find_chains_and_filter_agree(self):
        chain_cy = pytest.importorskip(
            "threatgraph._kernel.chain_cy", reason="compiled kernel not built"
        )
        rng = random.Random(314)
        for _ in range(150):
            n = rng.randint(0, 14)
            src = [rng.randint(0, 4) for _ in range(n)]
            dest = [rng.randint(0, 4) for _ in range(n)]
            ts = sorted(rng.randint(0, 50) for _ in range(n))
            tactic = [rng.randint(0, 5) for _ in range(n)]
            args = (
                rng.choice([0, 0, 5, 20]),
                rng.choice([0, 1, 2]),
                rng.choice([2, 3, 4, 8]),
                rng.random() < 0.5,
                rng.randint(0, 4),
                rng.choice([0, 1]),
            )
            pure = chain_py.find_chains(src, dest, ts, tactic, *args)
            compiled = chain_cy.find_chains(
                np.asarray(src, dtype=np.int64),
                np.asarray(dest, dtype=np.int64),
                np.asarray(ts, dtype=np.int64),
                np.asarray(tactic, dtype=np.int64),
                *args,
            )
            assert pure == compiled
            assert chain_py.filter_maximal(pure) == chain_cy.filter_maximal(compiled)
