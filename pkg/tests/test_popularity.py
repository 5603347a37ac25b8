import numpy as np
import pytest

from helpers import make_separable_corpus
from socialcast.errors import ConfigError
from socialcast.graph import Region, SocialGraph, User
from socialcast.popularity import (COMMIT, WAIT, Decision, FeatureVector, OnlineModel,
                                   baseline_view_predictor, extract_features,
                                   feature_bounds, label_level, prediction_reward,
                                   replay_baseline, replay_predictions,
                                   thresholds_from_quantiles, view_threshold_table)
from socialcast.propagation import PropagationParams, PropagationTree, Video, run_cascade
from socialcast.graph import GraphGenParams, generate_graph


def hand_tree():
    """Five-user tree over two regions with known per-age features."""
    regions = [Region(0, 0.0, 0.0), Region(1, 5.0, 0.0)]
    users = [User(0, 0), User(1, 0), User(2, 1), User(3, 1), User(4, 0)]
    g = SocialGraph(users, regions,
                    [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4)])
    tree = PropagationTree(
        video=Video(7, 10, 0),
        root=0,
        parent={1: 0, 2: 0, 3: 2, 4: 3},
        share_time={0: 10, 1: 12, 2: 13},
        view_time={3: 14},
        spreaders=frozenset({0, 1, 2}),
        receivers=frozenset({3}),
        horizon_slots=6,
        events=(),
    )
    return g, tree


def feature(video=0, age=1, **dims):
    base = {"views_total": 0.0, "shares_total": 1.0, "views_last": 0.0,
            "shares_last": 0.0, "initiator_degree": 1.0,
            "spreader_clustering": 0.0, "regions_reached": 1.0}
    base.update(dims)
    return FeatureVector(video, age, tuple(base.values()))


# --------------------------------------------------------------- features

def test_root_only_features_at_age_one():
    g, _ = hand_tree()
    tree = PropagationTree(Video(0, 0, 0), 0, {}, {0: 0}, {}, frozenset({0}),
                           frozenset(), 4, ())
    x = extract_features(tree, g, 1)
    assert x.dims[0] == 0.0   # views
    assert x.dims[1] == 1.0   # the root share counts
    assert x.dims[6] == 1.0   # one region reached


def test_hand_tree_features_age_four():
    g, tree = hand_tree()
    x = extract_features(tree, g, 4)
    views, shares, views_last, shares_last, deg, cc, regions = x.dims
    assert views == 3.0        # users 1, 2 and 3 watched
    assert shares == 3.0       # root, 1 and 2
    assert views_last == 1.0   # user 3 at slot 14
    assert shares_last == 0.0
    assert deg == 2.0          # root's friends: 1 and 2
    assert cc == 1.0           # spreaders {0,1,2} form a triangle
    assert regions == 2.0


def test_hand_tree_features_age_two():
    g, tree = hand_tree()
    x = extract_features(tree, g, 2)
    assert x.dims[0] == 1.0
    assert x.dims[1] == 2.0
    assert x.dims[2] == 1.0
    assert x.dims[3] == 1.0
    assert x.dims[5] == 0.0   # {0,1}: induced degrees below 2
    assert x.dims[6] == 1.0


def test_prefix_measurability():
    from socialcast.propagation import tree_prefix
    g = generate_graph(60, 3, GraphGenParams(), 10.0, seed=13)
    params = PropagationParams(0.7, 0.4, lag_max=5)
    tree = run_cascade(g, Video(0, 0, 0), params, 30, np.random.default_rng(2))
    for age in (1, 3, 7, 15):
        full = extract_features(tree, g, age)
        truncated = extract_features(tree_prefix(tree, age), g, age)
        assert full == truncated


def test_feature_age_out_of_range():
    g, tree = hand_tree()
    with pytest.raises(ValueError):
        extract_features(tree, g, 7)
    with pytest.raises(ValueError):
        extract_features(tree, g, 0)


# ------------------------------------------------------------------ labels

def test_label_level_examples():
    assert label_level(1, [10, 100]) == 1
    assert label_level(10, [10, 100]) == 1   # strictly-below rule
    assert label_level(11, [10, 100]) == 2
    assert label_level(1000, [10, 100]) == 3


def test_label_level_validates_thresholds():
    with pytest.raises(ConfigError):
        label_level(5, [])
    with pytest.raises(ConfigError):
        label_level(5, [10, 10])


def test_label_level_monotone():
    thresholds = [3, 8, 20]
    levels = [label_level(p, thresholds) for p in range(1, 40)]
    assert levels == sorted(levels)


def test_quantile_thresholds_reproduce_target_classes():
    rng = np.random.default_rng(0)
    pops = [int(p) for p in rng.zipf(1.8, size=2000)]
    thresholds = thresholds_from_quantiles(pops, (0.7, 0.98))
    levels = [label_level(p, thresholds) for p in pops]
    top_frac = np.mean([lv == 3 for lv in levels])
    assert top_frac <= 0.02 + 0.01
    # every bottom-30% video lands in the lowest level
    q30 = np.quantile(pops, 0.30)
    assert all(lv == 1 for p, lv in zip(pops, levels) if p <= q30)


# ---------------------------------------------------------------- deciding

def make_model(**kw):
    defaults = dict(n_levels=2, horizon_ages=6, feature_bounds=[100.0] * 7,
                    bins_per_dim=4, exploration_threshold=3, confidence_floor=0.8)
    defaults.update(kw)
    return OnlineModel(**defaults)


def test_empty_model_waits_before_horizon():
    m = make_model()
    assert m.decide(feature(age=1)).action == WAIT


def test_unanimous_cell_commits():
    m = make_model()
    x = feature(age=2, views_total=50.0)
    for _ in range(100):
        m.update(x, 1)
    d = m.decide(x)
    assert d.action == COMMIT and d.level == 1 and d.age_committed == 2


def test_horizon_tie_breaks_to_lower_level():
    m = make_model(exploration_threshold=1)
    x = feature(age=6)
    for level in (1, 2, 1, 2, 1, 2):
        m.update(x, level)
    d = m.decide(x)
    assert d.committed and d.level == 1


def test_never_waits_at_horizon():
    m = make_model()
    assert m.decide(feature(age=6)).committed          # empty model
    x = feature(age=6, views_total=3.0)
    m.update(x, 2)
    assert m.decide(x).committed                        # under-explored cell


def test_low_confidence_waits():
    m = make_model(confidence_floor=0.9)
    x = feature(age=3)
    for level in (1, 1, 2):
        m.update(x, level)
    assert m.decide(x).action == WAIT


# ---------------------------------------------------------------- updating

def test_update_counts_single_sample():
    m = make_model()
    x = feature(age=1)
    m.update(x, 2)
    counts = m.cell_counts(x)
    assert counts.tolist() == [0, 1]


def test_update_locality():
    m = make_model()
    a = feature(age=1, views_total=1.0)
    b = feature(age=1, views_total=99.0)
    assert m.cell_key(a) != m.cell_key(b)
    m.update(a, 1)
    assert m.cell_counts(b).sum() == 0


def test_update_order_invariance_exact():
    samples = [(feature(age=2, views_total=float(v)), 1 + v % 2)
               for v in (1, 30, 60, 90, 1, 30)]
    m1, m2 = make_model(), make_model()
    for x, lv in samples:
        m1.update(x, lv)
    for x, lv in reversed(samples):
        m2.update(x, lv)
    for x, _ in samples:
        assert m1.cell_counts(x).tolist() == m2.cell_counts(x).tolist()


def test_majority_matches_known_mode():
    rng = np.random.default_rng(7)
    m = make_model(n_levels=3, confidence_floor=0.45)
    x = feature(age=4)
    for _ in range(1000):
        m.update(x, int(rng.choice([1, 2, 3], p=[0.2, 0.5, 0.3])))
    counts = m.cell_counts(x)
    assert int(np.argmax(counts)) + 1 == 2
    d = m.decide(x)
    assert d.committed and d.level == 2


# ------------------------------------------------------------------ reward

def test_reward_correct_at_age_one_is_maximal():
    assert prediction_reward(Decision.commit(1, 1), 1, 24) == 1.0


def test_reward_wrong_is_zero():
    for age in (1, 12, 24):
        assert prediction_reward(Decision.commit(2, age), 1, 24) == 0.0


def test_reward_midway():
    assert prediction_reward(Decision.commit(1, 12), 1, 24) == pytest.approx(13 / 24)


def test_reward_requires_commit():
    with pytest.raises(ValueError):
        prediction_reward(Decision.wait(), 1, 24)


def test_reward_bounds_and_monotonicity():
    rewards = [prediction_reward(Decision.commit(1, age), 1, 24)
               for age in range(1, 25)]
    assert all(0.0 <= r <= 1.0 for r in rewards)
    assert rewards == sorted(rewards, reverse=True)


# ---------------------------------------------------------------- baseline

def test_baseline_zero_views_lowest_level():
    d = baseline_view_predictor(feature(age=3, views_total=0.0), {3: [10.0, 100.0]})
    assert d.committed and d.level == 1 and d.age_committed == 3


def test_baseline_above_top_threshold():
    d = baseline_view_predictor(feature(age=3, views_total=500.0), {3: [10.0, 100.0]})
    assert d.level == 3


def test_baseline_missing_row():
    with pytest.raises(ConfigError):
        baseline_view_predictor(feature(age=4), {3: [10.0]})


def test_online_beats_baseline_on_separable_corpus():
    corpus = make_separable_corpus(seed=0)
    bounds = feature_bounds(x for _, by_age, _ in corpus for x in by_age.values())
    model = OnlineModel(n_levels=2, horizon_ages=8, feature_bounds=bounds,
                        exploration_threshold=3, confidence_floor=0.8)
    online_rows = replay_predictions(model, corpus)
    table = view_threshold_table(corpus, (0.5,), ages=[4])
    base_rows = replay_baseline(corpus, table, commit_age=4, horizon=8)
    online = np.mean([r.reward for r in online_rows])
    base = np.mean([r.reward for r in base_rows])
    assert online > base


def test_replay_scores_before_updating():
    # The very first cascade must be scored by an empty model: it commits
    # only at the horizon.
    corpus = make_separable_corpus(seed=1, n_videos=5)
    model = OnlineModel(n_levels=2, horizon_ages=8,
                        feature_bounds=feature_bounds(
                            x for _, b, _ in corpus for x in b.values()))
    rows = replay_predictions(model, corpus)
    assert rows[0].commit_age == 8
