"""Seeded end-to-end scenario orchestration.

A scenario runs one deterministic event loop with a fixed phase order
inside each slot: video initiations, susceptibility bookkeeping,
replication decisions, mobility plus D2D, request serving, then
end-of-slot accounting. Popularity prediction is scored in a separate
single-pass replay over completed cascades in initiation order, since
nothing downstream consumes predictions inside the loop.

Randomness fans out from the scenario seed through per-entity
substreams (see seeds.rng_for), so strategies share random numbers and
comparisons are paired.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from . import __version__
from .analysis import (LagHistogram, StrategyReport, class_filter, distance_cdf,
                       fig2_experiment, fit_zipf, lag_law_consistent,
                       paired_difference_ci, reshare_lags, strategy_report)
from .config import (D2D_MODES, REPLICATION_STRATEGIES, ScenarioConfig,
                     config_hash, load_config, save_config, scenario_id)
from .d2d import (DeviceCache, MobilityTrace, d2d_step, flood_baseline,
                  generate_mobility_model, generate_traces, predict_mobility,
                  predict_recipients, select_carriers)
from .delivery import (EdgeServer, PeerIndex, ReplicaMap, RequestEvent, ServeCosts,
                       Source, fit_c1_c2, geo_influence_index, replication_decision,
                       serve)
from .errors import AnalysisError, ConfigError
from .graph import GraphGenParams, SocialGraph, generate_graph, load_graph, save_graph
from .popularity import (FeatureVector, OnlineModel, extract_features, feature_bounds,
                         label_level, replay_baseline, replay_predictions,
                         thresholds_from_quantiles, view_threshold_table)
from .propagation import (EVENT_EXPOSE, EVENT_IMMUNE, EVENT_INIT, EVENT_RECOVER,
                          EVENT_SHARE, EVENT_WATCH, PropagationParams,
                          PropagationTree, Video, popularity, run_cascade)
from .records import (D2DLog, DeliveryLog, DeliveryRow, EventLog,
                      PredictionReport, write_csv)
from .seeds import derive_seed, rng_for


def build_graph(cfg: ScenarioConfig) -> SocialGraph:
    if cfg.graph_files is not None:
        return load_graph(cfg.graph_files.edges, cfg.graph_files.users,
                          cfg.graph_files.regions)
    gp = cfg.graph
    params = GraphGenParams(
        edges_per_node=gp.edges_per_node, triad_prob=gp.triad_prob,
        area_side_km=gp.area_side_km, login_prob=gp.login_prob,
        storage_slots=gp.storage_slots, bandwidth_units=gp.bandwidth_units)
    return generate_graph(gp.n_users, gp.n_regions, params,
                          gp.homophily_scale_km, derive_seed(cfg.seed, "graph"))


def schedule_videos(cfg: ScenarioConfig, g: SocialGraph) -> list[Video]:
    """Poisson-style schedule: i.i.d. uniform slots, degree-biased initiators.

    Initiation slots leave a full prediction window before the scenario
    horizon. Ids are assigned in initiation order.
    """
    if cfg.horizon_slots == 0:
        return []
    rng = rng_for(cfg.seed, "videos")
    window = cfg.horizon_slots - cfg.prediction.horizon_ages
    slots = np.sort(rng.integers(0, window + 1, size=cfg.videos.count))
    ids = sorted(g.users)
    weights = np.array([g.degree(u) + 1 for u in ids], dtype=float)
    weights /= weights.sum()
    initiators = rng.choice(ids, size=cfg.videos.count, p=weights)
    return [Video(k, int(slots[k]), int(initiators[k]), cfg.videos.size_units)
            for k in range(cfg.videos.count)]


def simulate_cascades(cfg: ScenarioConfig
                      ) -> tuple[SocialGraph, list[Video], dict[int, PropagationTree]]:
    """Propagation only: the graph, the schedule, and every share tree."""
    g = build_graph(cfg)
    videos = schedule_videos(cfg, g)
    params = PropagationParams(cfg.propagation.p_watch, cfg.propagation.p_share,
                               cfg.propagation.lag_shape, cfg.propagation.lag_max)
    trees = {}
    for v in videos:
        horizon = cfg.horizon_slots - v.t_init
        trees[v.id] = run_cascade(g, v, params, horizon, rng_for(cfg.seed, "cascade", v.id))
    return g, videos, trees


@dataclass
class ScenarioResult:
    cfg: ScenarioConfig
    scenario: str
    graph: SocialGraph
    videos: list[Video]
    trees: dict[int, PropagationTree]
    popularities: dict[int, int]
    levels: dict[int, int]
    thresholds: list[float]
    corpus: list[tuple[int, dict[int, FeatureVector], int]]
    event_log: EventLog
    delivery_log: DeliveryLog
    d2d_log: D2DLog
    prediction_online: PredictionReport
    prediction_baseline: PredictionReport
    mobility: MobilityTrace | None
    report: StrategyReport
    lag_law_ok: bool
    replica_history: list[tuple[int, int, int, str]]  # slot, video, region, action


def _prediction_corpus(cfg, g, videos, trees):
    if not videos:
        return {}, [], {}, []
    pops = {v.id: popularity(trees[v.id]) for v in videos}
    if cfg.prediction.thresholds is not None:
        thresholds = list(cfg.prediction.thresholds)
    else:
        thresholds = thresholds_from_quantiles(list(pops.values()), cfg.prediction.quantiles)
    levels = {vid: label_level(p, thresholds) for vid, p in pops.items()}
    corpus = []
    for v in videos:
        by_age = {age: extract_features(trees[v.id], g, age)
                  for age in range(1, cfg.prediction.horizon_ages + 1)}
        corpus.append((v.id, by_age, levels[v.id]))
    return pops, thresholds, levels, corpus


def _run_predictions(cfg, corpus, scen):
    pred = cfg.prediction
    online = PredictionReport(scen, "online")
    baseline = PredictionReport(scen, "baseline")
    if corpus:
        n_levels = pred.levels
        model = OnlineModel(
            n_levels=n_levels, horizon_ages=pred.horizon_ages,
            feature_bounds=feature_bounds(x for _, by_age, _ in corpus
                                          for x in by_age.values()),
            bins_per_dim=pred.bins_per_dim,
            exploration_threshold=pred.exploration_threshold,
            confidence_floor=pred.confidence_floor)
        online.rows = replay_predictions(model, corpus)
        table = view_threshold_table(corpus, pred.quantiles,
                                     ages=[pred.baseline_commit_age])
        baseline.rows = replay_baseline(corpus, table, pred.baseline_commit_age,
                                        pred.horizon_ages)
    return online, baseline


def _index_events(videos, trees):
    inits_at: dict[int, list[Video]] = {}
    expose_at: dict[int, list[tuple[int, int]]] = {}
    resolve_at: dict[int, list[tuple[int, int]]] = {}
    watches_at: dict[int, list[tuple[int, int]]] = {}
    activation_of: dict[tuple[int, int], int] = {}
    for v in videos:
        inits_at.setdefault(v.t_init, []).append(v)
        for e in trees[v.id].events:
            if e.kind == EVENT_INIT:
                continue
            if e.kind == EVENT_EXPOSE:
                expose_at.setdefault(e.slot, []).append((v.id, e.user))
            elif e.kind in (EVENT_WATCH, EVENT_IMMUNE):
                resolve_at.setdefault(e.slot, []).append((v.id, e.user))
                activation_of[(v.id, e.user)] = e.slot
                if e.kind == EVENT_WATCH:
                    watches_at.setdefault(e.slot, []).append((e.user, v.id))
    return inits_at, expose_at, resolve_at, watches_at, activation_of


def _oracle_regions(tree: PropagationTree, g: SocialGraph,
                    positions_of) -> list[int]:
    """Regions where the video's viewers end up watching, plus the origin."""
    regions = {g.users[tree.root].home_region}
    for u, t in tree.share_time.items():
        if u != tree.root:
            regions.add(positions_of(u, t))
    for u, t in tree.view_time.items():
        regions.add(positions_of(u, t))
    return sorted(regions)


def influence_samples(trees, g) -> list[tuple[int, int]]:
    """(propagation size at T-1, distinct regions reached by T) pairs.

    One sample per slot in which a cascade gained participants; these are
    the measurements the influence-index coefficients are fitted to.
    """
    samples: list[tuple[int, int]] = []
    for tree in trees:
        joined: dict[int, list[int]] = {}
        for u, t in tree.share_time.items():
            joined.setdefault(t, []).append(u)
        for u, t in tree.view_time.items():
            joined.setdefault(t, []).append(u)
        count = 0
        regions: set[int] = set()
        for slot in sorted(joined):
            prev = count
            for u in joined[slot]:
                regions.add(g.users[u].home_region)
            count += len(joined[slot])
            if prev >= 1:
                samples.append((prev, len(regions)))
    return samples


def simulate(cfg: ScenarioConfig) -> ScenarioResult:
    """Run one full scenario in memory."""
    cfg.validate()
    scen = scenario_id(cfg)
    g, videos, trees = simulate_cascades(cfg)
    pops, thresholds, levels, corpus = _prediction_corpus(cfg, g, videos, trees)
    online, baseline = _run_predictions(cfg, corpus, scen)

    event_log = EventLog(scen)
    for v in videos:
        event_log.rows.extend(trees[v.id].events)
    event_log.rows.sort(key=lambda e: (e.slot, e.video, e.user, e.kind))

    d2d_on = cfg.d2d.mode != "off"
    mobility = None
    model = None
    if d2d_on and g.n_users:
        model = generate_mobility_model(g, sorted(g.users), cfg.d2d.dwell_mean,
                                        cfg.d2d.mobility_scale_km)
        mobility = generate_traces(model, {u: g.users[u].home_region for u in sorted(g.users)},
                                   cfg.horizon_slots + 1, rng_for(cfg.seed, "mobility"))
    homes = {u: g.users[u].home_region for u in sorted(g.users)}

    def positions_at(slot: int) -> dict[int, int]:
        if mobility is None:
            return homes
        return mobility.positions_at(slot)

    def positions_of(user: int, slot: int) -> int:
        if mobility is None:
            return homes[user]
        return mobility.region_at(user, slot)

    servers = {rid: EdgeServer(rid, r.storage_slots, r.bandwidth_units)
               for rid, r in sorted(g.regions.items())}
    replica_map = ReplicaMap()
    costs = ServeCosts(cfg.delivery.cost_local, cfg.delivery.cost_peer,
                       cfg.delivery.cost_origin)
    peer_index = PeerIndex(cfg.delivery.retention_slots, enabled=cfg.delivery.peer_serving)
    caches = {u: DeviceCache(u, cfg.d2d.device_capacity, cfg.d2d.energy_budget)
              for u in sorted(g.users)} if d2d_on else {}
    flood_left = {v.id: cfg.d2d.carrier_budget for v in videos}
    upload_used: set[tuple[int, int]] = set()

    inits_at, expose_at, resolve_at, watches_at, activation_of = _index_events(videos, trees)
    strategy = cfg.delivery.replication
    c1, c2 = cfg.delivery.c1, cfg.delivery.c2
    if cfg.delivery.fit_coefficients and videos:
        c1, c2 = fit_c1_c2(influence_samples(trees.values(), g))
    s_count = {v.id: 0 for v in videos}
    susceptible: dict[int, set[int]] = {v.id: set() for v in videos}
    started: list[Video] = []

    delivery_log = DeliveryLog(scen)
    d2d_log = D2DLog(scen)
    size = cfg.videos.size_units

    for slot in range(cfg.horizon_slots + 1):
        for server in servers.values():
            server.begin_slot(slot)
        positions = positions_at(slot)

        # Initiations: place origin (or oracle's future set) and seed state.
        for v in inits_at.get(slot, ()):
            started.append(v)
            replica_map.ensure_entry(v.id)
            if strategy == "oracle":
                targets = _oracle_regions(trees[v.id], g, positions_of)
            else:
                targets = [homes[v.initiator]]
            for region in targets:
                if servers[region].storage_slots < size:
                    continue
                evicted = servers[region].insert(v.id, size, slot)
                for vid in evicted:
                    replica_map.remove(vid, region, slot)
                replica_map.add(v.id, region, slot)
            s_count[v.id] = 1
            if d2d_on and caches[v.initiator].can_store(size):
                caches[v.initiator].store(v.id, size)

        for vid, user in expose_at.get(slot, ()):
            susceptible[vid].add(user)

        # Replication decisions from the previous slot's propagation size.
        if strategy == "influence-index":
            for v in started:
                if v.t_init >= slot or s_count[v.id] < 1:
                    continue
                g_idx = geo_influence_index(s_count[v.id], c1, c2)
                demand: dict[int, int] = {}
                for u in susceptible[v.id]:
                    r = positions[u]
                    demand[r] = demand.get(r, 0) + 1
                replication_decision(v.id, g_idx, replica_map, demand, servers, size, slot)

        # Mobility + D2D: carrier selection, flooding, then device deliveries.
        requests = sorted(watches_at.get(slot, ()))
        d2d_served: dict[tuple[int, int], int] = {}
        if d2d_on:
            for v in inits_at.get(slot, ()):
                if cfg.d2d.mode != "coverage":
                    continue
                sus = {u: activation_of[(v.id, u)] for u in susceptible[v.id]
                       if (v.id, u) in activation_of}
                recipients = predict_recipients(sus, g, model, positions,
                                                cfg.d2d.lookahead, slot)
                path_cache: dict[int, list] = {}
                candidate_paths = {}
                for u in sorted(g.users):
                    if u in susceptible[v.id] or caches[u].holds(v.id):
                        continue
                    region = positions[u]
                    if region not in path_cache:
                        path_cache[region] = predict_mobility(model, u, region,
                                                              cfg.d2d.lookahead, slot)
                    candidate_paths[u] = path_cache[region]
                assignment = select_carriers(
                    v.id, recipients, candidate_paths, cfg.d2d.carrier_budget,
                    caches, size)
                for carrier in assignment.carriers:
                    caches[carrier].store(v.id, size)
            if cfg.d2d.mode == "flood":
                for v in started:
                    if flood_left[v.id] <= 0:
                        continue
                    holders = sorted(u for u, c in caches.items() if c.holds(v.id))
                    for holder in holders:
                        if flood_left[v.id] <= 0:
                            break
                        events = flood_baseline(
                            v.id, holder, positions, cfg.d2d.fanout,
                            rng_for(cfg.seed, "flood", v.id, slot, holder),
                            caches, size, slot, copy_budget=flood_left[v.id])
                        flood_left[v.id] -= len(events)
            deliveries = d2d_step(slot, requests, positions, caches, upload_used)
            for d in deliveries:
                d2d_log.deliveries.append(d)
                d2d_served[(d.recipient, d.video)] = d.carrier
                delivery_log.rows.append(DeliveryRow(
                    slot, d.video, d.recipient, d.region, Source.PEER.value,
                    costs.peer))

        # Edge serving for the remaining requests, in user-id order.
        for user, vid in requests:
            if (user, vid) in d2d_served:
                peer_index.add_viewer_copy(user, vid, slot)
                continue
            outcome = serve(RequestEvent(slot, user, vid), replica_map, servers,
                            peer_index, positions, costs)
            delivery_log.rows.append(DeliveryRow(
                slot, vid, user, outcome.region, outcome.source.value, outcome.cost))
            peer_index.add_viewer_copy(user, vid, slot)

        # End-of-slot accounting feeds the next slot's s_{T-1}.
        for vid, user in resolve_at.get(slot, ()):
            susceptible[vid].discard(user)
        for user, vid in requests:
            s_count[vid] += 1

    report = strategy_report(delivery_log, online, d2d_log, strategy=strategy)
    params = PropagationParams(cfg.propagation.p_watch, cfg.propagation.p_share,
                               cfg.propagation.lag_shape, cfg.propagation.lag_max)
    return ScenarioResult(
        cfg=cfg, scenario=scen, graph=g, videos=videos, trees=trees,
        popularities=pops, levels=levels, thresholds=thresholds, corpus=corpus,
        event_log=event_log, delivery_log=delivery_log, d2d_log=d2d_log,
        prediction_online=online, prediction_baseline=baseline,
        mobility=mobility, report=report,
        lag_law_ok=lag_law_consistent(params),
        replica_history=list(replica_map.history))


@dataclass(frozen=True)
class RunManifest:
    config_hash: str
    seed: int
    versions: dict[str, str]
    outputs: tuple[str, ...]
    lag_law_consistent: bool

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True, indent=2) + "\n"


def run_scenario(cfg: ScenarioConfig, out_dir) -> RunManifest:
    """Simulate and write every artifact; reruns are byte-identical."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result = simulate(cfg)

    save_config(cfg, out / "config.json")
    save_graph(result.graph, out / "graph_edges.txt", out / "graph_users.csv",
               out / "graph_regions.csv")
    result.event_log.to_csv(out / "events.csv")
    result.delivery_log.to_csv(out / "delivery.csv")
    result.prediction_online.to_csv(out / "predictions_online.csv")
    result.prediction_baseline.to_csv(out / "predictions_baseline.csv")
    _write_popularity(result, out / "popularity.csv")
    _write_report(result.report, out / "report.csv")
    outputs = ["config.json", "delivery.csv", "events.csv", "graph_edges.txt",
               "graph_regions.csv", "graph_users.csv", "popularity.csv",
               "predictions_baseline.csv", "predictions_online.csv", "report.csv"]
    if result.mobility is not None:
        result.mobility.to_csv(out / "mobility.csv")
        result.d2d_log.to_csv(out / "d2d.csv")
        outputs.extend(["d2d.csv", "mobility.csv"])

    manifest = RunManifest(
        config_hash=config_hash(cfg), seed=cfg.seed,
        versions={"socialcast": __version__}, outputs=tuple(sorted(outputs)),
        lag_law_consistent=result.lag_law_ok)
    (out / "manifest.json").write_text(manifest.to_json())
    return manifest


def _write_popularity(result: ScenarioResult, path) -> None:
    rows = [(vid, result.popularities[vid], result.levels[vid])
            for vid in sorted(result.popularities)]
    write_csv(path, ("video_id", "popularity", "level"), rows)


def _write_report(report: StrategyReport, path) -> None:
    write_csv(path, ("strategy", "n_requests", "local_ratio", "peer_ratio",
                     "origin_ratio", "mean_cost", "d2d_ratio", "mean_reward"),
              [(report.strategy, report.n_requests, repr(report.local_ratio),
                repr(report.peer_ratio), repr(report.origin_ratio),
                repr(report.mean_cost), repr(report.d2d_ratio),
                repr(report.mean_reward))])


METRICS = ("local_ratio", "peer_ratio", "origin_ratio", "mean_cost",
           "d2d_ratio", "mean_reward")

_STRATEGY_TOKENS = tuple(REPLICATION_STRATEGIES) + tuple(f"d2d-{m}" for m in D2D_MODES)


def apply_strategy(cfg: ScenarioConfig, token: str) -> ScenarioConfig:
    """Interpret a compare token as a replication or D2D mode override."""
    if token in REPLICATION_STRATEGIES:
        return cfg.replace(delivery=dataclasses.replace(cfg.delivery, replication=token))
    if token.startswith("d2d-"):
        mode = token[len("d2d-"):]
        if mode in D2D_MODES:
            return cfg.replace(d2d=dataclasses.replace(cfg.d2d, mode=mode))
    raise ConfigError(f"unknown strategy token {token!r}; "
                      f"expected one of {_STRATEGY_TOKENS}")


class ComparisonRow(NamedTuple):
    strategy: str
    metric: str
    mean: float
    diff_vs_base: float
    ci_low: float
    ci_high: float


def compare_strategies(cfg: ScenarioConfig, strategies: Sequence[str], n_seeds: int,
                       ) -> list[ComparisonRow]:
    """Paired comparison over a common seed list.

    Every strategy runs the same seeds (cfg.seed + i), and all metrics
    are reported as means plus 95% confidence intervals of the paired
    difference against the first strategy in the list.
    """
    if n_seeds < 2:
        raise ConfigError("n_seeds must be >= 2")
    if not strategies:
        raise ConfigError("no strategies given")
    per_strategy: dict[str, dict[str, list[float]]] = {}
    for token in strategies:
        varied = apply_strategy(cfg, token)
        values: dict[str, list[float]] = {m: [] for m in METRICS}
        for i in range(n_seeds):
            result = simulate(varied.replace(seed=cfg.seed + i))
            for m in METRICS:
                values[m].append(getattr(result.report, m))
        per_strategy[token] = values

    base = strategies[0]
    rows: list[ComparisonRow] = []
    for token in strategies:
        for m in METRICS:
            mine = per_strategy[token][m]
            ref = per_strategy[base][m]
            diff, lo, hi = paired_difference_ci(mine, ref)
            rows.append(ComparisonRow(token, m, float(np.mean(mine)), diff, lo, hi))
    return rows


def write_comparison(rows: Sequence[ComparisonRow], base: str, path) -> None:
    write_csv(path, ("strategy", "metric", "mean", f"diff_vs_{base}", "ci_low", "ci_high"),
              [(r.strategy, r.metric, repr(r.mean), repr(r.diff_vs_base),
                repr(r.ci_low), repr(r.ci_high)) for r in rows])


def rebuild_trees(event_log: EventLog, cfg: ScenarioConfig,
                  g: SocialGraph) -> dict[int, PropagationTree]:
    """Reconstruct share trees from a written event log."""
    by_video: dict[int, list] = {}
    for e in event_log.rows:
        by_video.setdefault(e.video, []).append(e)
    trees: dict[int, PropagationTree] = {}
    for vid, events in sorted(by_video.items()):
        events.sort(key=lambda e: (e.slot, e.user, e.kind))
        init = next(e for e in events if e.kind == EVENT_INIT)
        video = Video(vid, init.slot, init.user, cfg.videos.size_units)
        parent, share_time, view_time = {}, {init.user: init.slot}, {}
        spreaders, receivers = {init.user}, set()
        for e in events:
            if e.kind == EVENT_EXPOSE:
                parent[e.user] = e.parent
            elif e.kind == EVENT_SHARE:
                spreaders.add(e.user)
                share_time[e.user] = e.slot
            elif e.kind == EVENT_RECOVER:
                receivers.add(e.user)
                view_time[e.user] = e.slot
        trees[vid] = PropagationTree(
            video=video, root=init.user, parent=parent, share_time=share_time,
            view_time=view_time, spreaders=frozenset(spreaders),
            receivers=frozenset(receivers),
            horizon_slots=cfg.horizon_slots - init.slot, events=tuple(events))
    return trees


def analyze_run(in_dir, fig: int, out_dir) -> list[str]:
    """Produce the plot-ready CSV for one empirical signature.

    fig 2: cascade size versus participant clustering scatter plus rho.
    fig 3: pairwise-distance CDFs for the popular and unpopular classes.
    fig 4: per-edge re-share lag histogram with the fitted power law.
    """
    in_dir, out = Path(in_dir), Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = load_config(in_dir / "config.json")
    g = load_graph(in_dir / "graph_edges.txt", in_dir / "graph_users.csv",
                   in_dir / "graph_regions.csv")
    event_log = EventLog.from_csv(in_dir / "events.csv")
    trees = list(rebuild_trees(event_log, cfg, g).values())
    if not trees:
        raise AnalysisError("no cascades in the input directory")
    written: list[str] = []

    if fig == 2:
        points, rho = fig2_experiment(trees, g, derive_seed(cfg.seed, "fig2"))
        write_csv(out / "fig2_scatter.csv", ("size", "clustering_coefficient"),
                  [(s, repr(c)) for s, c in points])
        (out / "fig2_rho.txt").write_text(f"{rho!r}\n")
        written += ["fig2_scatter.csv", "fig2_rho.txt"]
    elif fig == 3:
        pops = [popularity(t) for t in trees]
        for name in ("unpopular", "popular"):
            cdf = distance_cdf(trees, g, class_filter(name, pops))
            write_csv(out / f"fig3_cdf_{name}.csv", ("km", "fraction"),
                      [(repr(v), repr(f)) for v, f in zip(cdf.values, cdf.fractions)])
            written.append(f"fig3_cdf_{name}.csv")
    elif fig == 4:
        lags: list[int] = []
        for t in trees:
            lags.extend(reshare_lags(t))
        if not lags:
            raise AnalysisError("no re-shares in the corpus")
        hist = LagHistogram.from_lags(lags)
        xs, ys = hist.nonzero()
        slope, intercept = np.polyfit(np.log(xs), np.log(ys), 1)
        fitted = np.exp(intercept) * xs ** slope
        write_csv(out / "fig4_lag.csv", ("lag", "count", "fitted"),
                  [(int(l), int(c), repr(float(f))) for l, c, f in zip(xs, ys, fitted)])
        (out / "fig4_shape.txt").write_text(f"{fit_zipf(hist)!r}\n")
        written += ["fig4_lag.csv", "fig4_shape.txt"]
    else:
        raise ConfigError(f"unknown figure {fig}; expected 2, 3 or 4")
    return written
