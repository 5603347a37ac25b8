"""Statistical reproduction of the empirical propagation signatures.

Covers the zipf re-share-lag fit, pairwise-distance CDFs split by
popularity class (top 2% vs bottom 30%), the cascade-size versus
group-clustering correlation, and exact hit-ratio accounting for
strategy comparison. All functions are pure over immutable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import stats

from .errors import AnalysisError, FitError
from .graph import SocialGraph, clustering_coefficient
from .propagation import PropagationParams, PropagationTree, lag_mass_within, popularity


@dataclass(frozen=True)
class LagHistogram:
    """Re-share counts indexed by lag in slots (lag >= 1)."""

    lags: tuple[int, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.lags) != len(self.counts):
            raise ValueError("lags and counts must align")
        if any(l < 1 for l in self.lags):
            raise ValueError("lags must be >= 1")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be nonnegative")

    @classmethod
    def from_lags(cls, samples: Iterable[int]) -> "LagHistogram":
        arr = np.asarray(list(samples), dtype=int)
        if arr.size == 0:
            raise AnalysisError("no lag samples")
        counts = np.bincount(arr)
        lags = np.nonzero(counts)[0]
        return cls(tuple(int(l) for l in lags), tuple(int(counts[l]) for l in lags))

    def nonzero(self) -> tuple[np.ndarray, np.ndarray]:
        lags = np.asarray(self.lags, dtype=float)
        counts = np.asarray(self.counts, dtype=float)
        mask = counts > 0
        return lags[mask], counts[mask]


def fit_zipf(hist: LagHistogram) -> float:
    """Shape s from the least-squares slope of ln(count) on ln(lag)."""
    lags, counts = hist.nonzero()
    if lags.size < 2:
        raise FitError("need at least 2 nonzero bins to fit")
    slope, _ = np.polyfit(np.log(lags), np.log(counts), 1)
    return float(-slope)


def reshare_lags(tree: PropagationTree) -> list[int]:
    """Per-edge share lags: each re-share relative to its exposer's share."""
    out = []
    for user, t in tree.share_time.items():
        if user == tree.root:
            continue
        parent = tree.parent[user]
        out.append(t - tree.share_time[parent])
    return out


def lag_law_consistent(params: PropagationParams, window: int = 24,
                       min_mass: float = 0.95) -> bool:
    """Whether the truncated lag law keeps min_mass within the window.

    Configs failing this are inconsistent with the measured
    95%-within-24-hours behavior and should be flagged, not silently
    renormalized.
    """
    return lag_mass_within(params, window) >= min_mass


@dataclass(frozen=True)
class DistanceCDF:
    """Empirical CDF over pairwise participant distances in km."""

    values: tuple[float, ...]      # ascending unique distances
    fractions: tuple[float, ...]   # nondecreasing, final 1.0
    n_samples: int

    @classmethod
    def from_samples(cls, samples: Sequence[float]) -> "DistanceCDF":
        if not samples:
            raise AnalysisError("no distance samples")
        arr = np.sort(np.asarray(samples, dtype=float))
        values, counts = np.unique(arr, return_counts=True)
        fractions = np.cumsum(counts) / arr.size
        return cls(tuple(float(v) for v in values),
                   tuple(float(f) for f in fractions), arr.size)

    def median(self) -> float:
        half = 0.5
        for v, f in zip(self.values, self.fractions):
            if f >= half:
                return v
        return self.values[-1]


def popularity_class_bounds(popularities: Sequence[int],
                            bottom_q: float = 0.30, top_q: float = 0.98) -> tuple[float, float]:
    """(bottom cutoff, top cutoff) popularity values for the two classes."""
    if not popularities:
        raise AnalysisError("empty popularity list")
    return (float(np.quantile(popularities, bottom_q)),
            float(np.quantile(popularities, top_q)))


def class_filter(which: str, popularities: Sequence[int]) -> Callable[[PropagationTree], bool]:
    """Membership predicate for the 'popular' / 'unpopular' / 'all' classes."""
    bottom, top = popularity_class_bounds(popularities)
    if which == "popular":
        return lambda t: popularity(t) >= top
    if which == "unpopular":
        return lambda t: popularity(t) <= bottom
    if which == "all":
        return lambda t: True
    raise AnalysisError(f"unknown popularity class {which!r}")


def distance_cdf(trees: Sequence[PropagationTree], g: SocialGraph,
                 keep: Callable[[PropagationTree], bool] | None = None,
                 pairwise: bool = True) -> DistanceCDF:
    """CDF of home-region distances between participants of each cascade.

    Distances are pooled over all participant pairs within each kept
    tree; with pairwise=False only parent-child pairs along the share
    tree contribute (a sensitivity variant).
    """
    kept = [t for t in trees if keep is None or keep(t)]
    if not kept:
        raise AnalysisError("no cascades in the requested class")
    samples: list[float] = []
    for tree in kept:
        if pairwise:
            users = sorted(tree.participants)
            for a, b in combinations(users, 2):
                samples.append(g.user_distance(a, b))
        else:
            for child in sorted(tree.parent):
                if child in tree.participants:
                    samples.append(g.user_distance(child, tree.parent[child]))
    if not samples:
        raise AnalysisError("no participant pairs in the requested class")
    return DistanceCDF.from_samples(samples)


def rank_correlation(x: Sequence[float], y: Sequence[float]) -> float:
    """Spearman rank correlation with average-rank tie handling."""
    if len(x) != len(y):
        raise ValueError("rank_correlation: length mismatch")
    if len(x) < 3:
        raise ValueError("rank_correlation: need at least 3 points")
    rho = stats.spearmanr(x, y).statistic
    return float(rho)


def fig2_experiment(trees: Sequence[PropagationTree], g: SocialGraph,
                    seed: int, n_samples: int = 50) -> tuple[list[tuple[int, float]], float]:
    """Size-versus-clustering scatter over a stratified cascade sample.

    Cascades are ordered by popularity, split into n_samples contiguous
    strata, and one cascade is drawn per stratum, so the sample spans
    the whole size range. Returns (size, participant clustering) pairs
    plus their Spearman rho. Deterministic per seed.
    """
    if len(trees) < n_samples:
        raise AnalysisError(f"need at least {n_samples} cascades, got {len(trees)}")
    sizes = [popularity(t) for t in trees]
    if len(set(sizes)) < 3:
        raise AnalysisError("need at least 3 distinct cascade sizes")
    order = sorted(range(len(trees)), key=lambda i: (sizes[i], trees[i].video.id))
    strata = np.array_split(np.asarray(order), n_samples)
    rng = np.random.default_rng(seed)
    points: list[tuple[int, float]] = []
    for stratum in strata:
        idx = int(stratum[rng.integers(len(stratum))])
        tree = trees[idx]
        cc = clustering_coefficient(g, tree.participants)
        points.append((sizes[idx], cc))
    rho = rank_correlation([p[0] for p in points], [p[1] for p in points])
    return points, rho


@dataclass(frozen=True)
class StrategyReport:
    """Serving mix and headline metrics for one scenario run."""

    scenario: str
    strategy: str
    n_requests: int
    local_ratio: float
    peer_ratio: float
    origin_ratio: float
    mean_cost: float
    d2d_ratio: float
    mean_reward: float

    def __post_init__(self):
        total = self.local_ratio + self.peer_ratio + self.origin_ratio
        if self.n_requests and abs(total - 1.0) > 1e-9:
            raise ValueError(f"serving ratios sum to {total}, not 1")


def strategy_report(delivery_log, prediction_rows, d2d_log=None,
                    strategy: str = "") -> StrategyReport:
    """Exact ratio accounting over one scenario's logs.

    All logs must come from the same scenario run; mismatched scenario
    ids raise ValueError.
    """
    scenario = delivery_log.scenario
    for other in (prediction_rows, d2d_log):
        if other is not None and other.scenario != scenario:
            raise ValueError(
                f"scenario mismatch: {other.scenario!r} != {scenario!r}")
    counts = {"LOCAL_EDGE": 0, "PEER": 0, "ORIGIN": 0}
    total_cost = 0.0
    for row in delivery_log.rows:
        counts[row.source] += 1
        total_cost += row.cost
    n = sum(counts.values())
    rewards = [r.reward for r in prediction_rows.rows] if prediction_rows is not None else []
    n_d2d = len(d2d_log.deliveries) if d2d_log is not None else 0
    return StrategyReport(
        scenario=scenario,
        strategy=strategy,
        n_requests=n,
        local_ratio=counts["LOCAL_EDGE"] / n if n else 0.0,
        peer_ratio=counts["PEER"] / n if n else 0.0,
        origin_ratio=counts["ORIGIN"] / n if n else 0.0,
        mean_cost=total_cost / n if n else 0.0,
        d2d_ratio=n_d2d / n if n else 0.0,
        mean_reward=float(np.mean(rewards)) if rewards else 0.0,
    )


def paired_difference_ci(a: Sequence[float], b: Sequence[float],
                         confidence: float = 0.95) -> tuple[float, float, float]:
    """Mean difference a-b with a t-based confidence interval."""
    if len(a) != len(b) or len(a) < 2:
        raise ValueError("need paired samples of equal length >= 2")
    diffs = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    mean = float(diffs.mean())
    se = float(diffs.std(ddof=1) / np.sqrt(len(diffs)))
    if se == 0.0:
        return mean, mean, mean
    t_crit = float(stats.t.ppf(0.5 + confidence / 2, len(diffs) - 1))
    return mean, mean - t_crit * se, mean + t_crit * se
