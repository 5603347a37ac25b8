from collections import Counter

import pytest

from socialcast.config import (D2DConfig, GraphConfig, PredictionConfig,
                               PropagationConfig, ScenarioConfig, VideoConfig)
from socialcast.errors import ConfigError
from socialcast.propagation import EVENT_WATCH, popularity
from socialcast.runner import (METRICS, apply_strategy, compare_strategies,
                               rebuild_trees, run_scenario, simulate,
                               simulate_cascades)


def tiny_config(**overrides):
    base = dict(seed=2, horizon_slots=60,
                graph=GraphConfig(n_users=40, n_regions=3, storage_slots=6,
                                  bandwidth_units=3),
                propagation=PropagationConfig(p_watch=0.8, p_share=0.3, lag_max=6),
                videos=VideoConfig(count=6),
                prediction=PredictionConfig(horizon_ages=12, baseline_commit_age=4))
    base.update(overrides)
    return ScenarioConfig(**base)


# ----------------------------------------------------------------- schedule

def test_schedule_respects_prediction_window():
    cfg = tiny_config()
    g, videos, trees = simulate_cascades(cfg)
    for v in videos:
        assert 0 <= v.t_init <= cfg.horizon_slots - cfg.prediction.horizon_ages
        assert trees[v.id].horizon_slots >= cfg.prediction.horizon_ages
    assert [v.id for v in videos] == sorted(v.id for v in videos)
    t_inits = [v.t_init for v in videos]
    assert t_inits == sorted(t_inits)


def test_schedule_empty_at_zero_horizon():
    cfg = tiny_config(horizon_slots=0)
    g, videos, trees = simulate_cascades(cfg)
    assert videos == [] and trees == {}


# ----------------------------------------------------------------- simulate

def test_horizon_zero_empty_logs_no_error():
    result = simulate(tiny_config(horizon_slots=0))
    assert result.event_log.rows == []
    assert result.delivery_log.rows == []
    assert result.report.n_requests == 0


def test_same_seed_identical_logs():
    cfg = tiny_config()
    a, b = simulate(cfg), simulate(cfg)
    assert a.event_log.rows == b.event_log.rows
    assert a.delivery_log.rows == b.delivery_log.rows
    assert a.prediction_online.rows == b.prediction_online.rows
    assert a.report == b.report


def test_every_watch_served_exactly_once():
    result = simulate(tiny_config())
    watches = [(e.slot, e.user, e.video) for e in result.event_log.rows
               if e.kind == EVENT_WATCH]
    served = [(r.slot, r.user, r.video) for r in result.delivery_log.rows]
    assert Counter(served) == Counter(watches)
    assert all(count == 1 for count in Counter(served).values())


def test_reports_are_exact_ratios():
    result = simulate(tiny_config())
    counts = Counter(r.source for r in result.delivery_log.rows)
    n = result.report.n_requests
    assert n == sum(counts.values())
    assert result.report.local_ratio == counts.get("LOCAL_EDGE", 0) / n
    assert result.report.peer_ratio == counts.get("PEER", 0) / n
    assert result.report.origin_ratio == counts.get("ORIGIN", 0) / n


def test_bandwidth_capacity_respected_in_log():
    cfg = tiny_config(graph=GraphConfig(n_users=40, n_regions=3, storage_slots=6,
                                        bandwidth_units=2))
    result = simulate(cfg)
    per_slot_region = Counter((r.slot, r.region) for r in result.delivery_log.rows
                              if r.source == "LOCAL_EDGE")
    assert all(v <= 2 for v in per_slot_region.values())


def test_local_edge_implies_replica_present():
    cfg = tiny_config()
    result = simulate(cfg)
    videos = {v.id for v in result.videos}
    users = set(result.graph.users)
    for row in result.delivery_log.rows:
        assert row.video in videos
        assert row.user in users
    # Replay placement intervals from the replica history: every
    # LOCAL_EDGE outcome must fall inside an ADD..EVICT window.
    history = sorted(result.replica_history)
    for row in result.delivery_log.rows:
        if row.source != "LOCAL_EDGE":
            continue
        placed = False
        for slot, video, region, action in history:
            if slot > row.slot:
                break
            if video == row.video and region == row.region:
                placed = action == "ADD"
        assert placed, f"LOCAL_EDGE without placement: {row}"


def test_d2d_energy_budget_in_logs():
    cfg = tiny_config(d2d=D2DConfig(mode="coverage", energy_budget=4,
                                    carrier_budget=2, device_capacity=3))
    result = simulate(cfg)
    per_carrier = Counter(d.carrier for d in result.d2d_log.deliveries)
    assert all(v <= 4 for v in per_carrier.values())


def test_cross_log_referential_integrity_with_d2d():
    cfg = tiny_config(d2d=D2DConfig(mode="coverage", carrier_budget=2,
                                    energy_budget=10, device_capacity=3,
                                    dwell_mean=5.0, lookahead=12))
    result = simulate(cfg)
    assert result.mobility is not None
    for d in result.d2d_log.deliveries:
        assert result.mobility.region_at(d.carrier, d.slot) == d.region
        assert result.mobility.region_at(d.recipient, d.slot) == d.region
    # every d2d delivery surfaces as a PEER outcome for that request
    peer_rows = {(r.slot, r.user, r.video) for r in result.delivery_log.rows
                 if r.source == "PEER"}
    for d in result.d2d_log.deliveries:
        assert (d.slot, d.recipient, d.video) in peer_rows


def test_rebuild_trees_round_trip():
    cfg = tiny_config()
    result = simulate(cfg)
    rebuilt = rebuild_trees(result.event_log, cfg, result.graph)
    assert set(rebuilt) == set(result.trees)
    for vid, tree in result.trees.items():
        assert rebuilt[vid].spreaders == tree.spreaders
        assert rebuilt[vid].receivers == tree.receivers
        assert rebuilt[vid].share_time == tree.share_time
        assert popularity(rebuilt[vid]) == popularity(tree)


def test_fit_mode_replaces_coefficients():
    import dataclasses as dc
    from socialcast.delivery import fit_c1_c2
    from socialcast.runner import influence_samples

    cfg = tiny_config(videos=VideoConfig(count=12))
    g, videos, trees = simulate_cascades(cfg)
    c1, c2 = fit_c1_c2(influence_samples(trees.values(), g))
    assert c1 > 0 and c2 > 0
    fitted = simulate(cfg.replace(delivery=dc.replace(cfg.delivery,
                                                      fit_coefficients=True)))
    assert fitted.report.n_requests > 0


def test_propagation_unaffected_by_strategy():
    cfg = tiny_config()
    static = simulate(apply_strategy(cfg, "static"))
    oracle = simulate(apply_strategy(cfg, "oracle"))
    assert static.event_log.rows == oracle.event_log.rows


# ------------------------------------------------------------------ compare

def test_compare_self_is_exactly_zero():
    cfg = tiny_config()
    rows = compare_strategies(cfg, ["static", "static"], n_seeds=3)
    for row in rows:
        if row.strategy == "static":
            assert row.diff_vs_base == 0.0
            assert row.ci_low == 0.0 and row.ci_high == 0.0


def test_compare_row_count_is_strategies_times_metrics():
    cfg = tiny_config()
    rows = compare_strategies(cfg, ["static", "influence-index"], n_seeds=2)
    assert len(rows) == 2 * len(METRICS)


def test_oracle_dominates_static_per_seed():
    cfg = tiny_config(graph=GraphConfig(n_users=60, n_regions=4, storage_slots=10,
                                        bandwidth_units=4),
                      videos=VideoConfig(count=8))
    for i in range(4):
        seeded = cfg.replace(seed=30 + i)
        static = simulate(apply_strategy(seeded, "static"))
        oracle = simulate(apply_strategy(seeded, "oracle"))
        assert oracle.report.local_ratio >= static.report.local_ratio


def test_compare_needs_two_seeds():
    with pytest.raises(ConfigError):
        compare_strategies(tiny_config(), ["static"], n_seeds=1)


def test_apply_strategy_tokens():
    cfg = tiny_config()
    assert apply_strategy(cfg, "oracle").delivery.replication == "oracle"
    assert apply_strategy(cfg, "d2d-flood").d2d.mode == "flood"
    with pytest.raises(ConfigError):
        apply_strategy(cfg, "bogus")


# ---------------------------------------------------------------- manifests

def test_run_scenario_writes_everything(tmp_path):
    cfg = tiny_config()
    manifest = run_scenario(cfg, tmp_path / "out")
    for name in manifest.outputs:
        assert (tmp_path / "out" / name).exists()
    assert (tmp_path / "out" / "manifest.json").exists()
    assert manifest.seed == cfg.seed


def test_rerun_byte_identical(tmp_path):
    cfg = tiny_config(d2d=D2DConfig(mode="flood"))
    m1 = run_scenario(cfg, tmp_path / "a")
    m2 = run_scenario(cfg, tmp_path / "b")
    assert m1 == m2
    for name in list(m1.outputs) + ["manifest.json"]:
        a = (tmp_path / "a" / name).read_bytes()
        b = (tmp_path / "b" / name).read_bytes()
        assert a == b, f"{name} differs between reruns"
