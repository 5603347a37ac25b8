"""Shared scenario builders for the unit and acceptance suites."""

import numpy as np

from socialcast.d2d import DeviceCache, MobilityModel, MobilityTrace
from socialcast.graph import Region, SocialGraph, User
from socialcast.popularity import FeatureVector, N_FEATURES


def make_separable_corpus(seed, n_videos=200, horizon=8):
    """Corpus where early views are noise but region spread marks the level.

    Level-2 videos reach three regions from age 1; level-1 videos stay in
    one. Cumulative views are drawn from the same distribution for both
    levels, so a view-threshold predictor is at chance while a learner
    that can see the region dimension separates perfectly.
    """
    rng = np.random.default_rng(seed)
    corpus = []
    for vid in range(n_videos):
        level = 1 + int(rng.random() < 0.5)
        regions = 1.0 if level == 1 else 3.0
        by_age = {}
        views = 0.0
        for age in range(1, horizon + 1):
            gained = float(rng.poisson(5))
            views += gained
            dims = [0.0] * N_FEATURES
            dims[0] = views          # views_total: same law for both levels
            dims[1] = 1.0            # shares_total
            dims[2] = gained         # views_last
            dims[3] = 0.0
            dims[4] = 10.0           # initiator degree
            dims[5] = 0.0
            dims[6] = regions        # regions_reached: the informative dim
            by_age[age] = FeatureVector(vid, age, tuple(dims))
        corpus.append((vid, by_age, level))
    return corpus


def carrier_handoff_scenario():
    """The hand-built crowdsourced-replication scenario.

    Regions 0 and 1. User a(0) initiates in region 0 where b(1) and e(4)
    also start; friends c(2) and d(3) live in region 1 and will watch at
    slots 2 and 3. e is nobody's friend but moves to region 1 at slot 2
    and stays, so e is the only useful carrier.
    """
    regions = [Region(0, 0.0, 0.0), Region(1, 10.0, 0.0)]
    users = [User(0, 0), User(1, 0), User(2, 1), User(3, 1), User(4, 0)]
    g = SocialGraph(users, regions, [(0, 1), (0, 2), (0, 3)])

    stay = np.eye(2)
    go_and_stay = np.array([[0.0, 1.0], [0.0, 1.0]])
    model = MobilityModel(
        region_ids=(0, 1),
        matrices={0: stay, 1: stay, 2: stay, 3: stay, 4: go_and_stay},
        dwell_mean={0: 4.0, 1: 4.0, 2: 4.0, 3: 4.0, 4: 2.0},
    )
    trace = MobilityTrace({
        0: [(0, 0, 8)],
        1: [(0, 0, 8)],
        2: [(1, 0, 8)],
        3: [(1, 0, 8)],
        4: [(0, 0, 2), (1, 2, 8)],
    }, horizon=8)
    caches = {u: DeviceCache(u, capacity=2, energy_budget=5) for u in range(5)}
    susceptibles = {2: 2, 3: 3}  # user -> activation slot (T2, T3)
    return g, model, trace, caches, susceptibles
