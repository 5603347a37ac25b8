"""Per-age propagation features and online multi-level popularity prediction.

The predictor partitions the 7-dimensional feature space into per-age
hypercube cells and keeps empirical level counts per cell. Deciding is a
stage-wise tradeoff: wait for more evidence, or commit a level early and
bank the timeliness bonus. A view-threshold baseline committing at a
fixed age is provided for comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import ConfigError
from .graph import SocialGraph, clustering_coefficient
from .propagation import PropagationTree

FEATURE_NAMES = (
    "views_total",
    "shares_total",
    "views_last",
    "shares_last",
    "initiator_degree",
    "spreader_clustering",
    "regions_reached",
)
N_FEATURES = len(FEATURE_NAMES)

WAIT = "WAIT"
COMMIT = "COMMIT"


@dataclass(frozen=True)
class FeatureVector:
    video: int
    age: int
    dims: tuple[float, ...]

    def __post_init__(self):
        if self.age < 1:
            raise ValueError("feature age must be >= 1")
        if len(self.dims) != N_FEATURES:
            raise ValueError(f"expected {N_FEATURES} dims, got {len(self.dims)}")
        if any(d < 0 for d in self.dims):
            raise ValueError("feature dims must be nonnegative")

    @property
    def views_total(self) -> float:
        return self.dims[0]


def extract_features(tree: PropagationTree, g: SocialGraph, age: int) -> FeatureVector:
    """Feature vector of the cascade prefix `age` slots after initiation.

    Deterministic in the prefix: events after t_init + age never affect it.
    """
    if age < 1:
        raise ValueError("age must be >= 1")
    if age > tree.horizon_slots:
        raise ValueError(f"age {age} beyond simulated horizon {tree.horizon_slots}")
    cutoff = tree.video.t_init + age
    root = tree.root

    shares = {u: t for u, t in tree.share_time.items() if t <= cutoff}
    views = {u: t for u, t in tree.view_time.items() if t <= cutoff}
    # A non-root spreader watched at its share slot; the root imported.
    views_total = (len(shares) - 1) + len(views)
    shares_total = len(shares)
    views_last = sum(1 for u, t in shares.items() if t == cutoff and u != root)
    views_last += sum(1 for t in views.values() if t == cutoff)
    shares_last = sum(1 for t in shares.values() if t == cutoff)

    participants = set(shares) | set(views)
    regions = {g.users[u].home_region for u in participants}
    return FeatureVector(
        video=tree.video.id,
        age=age,
        dims=(
            float(views_total),
            float(shares_total),
            float(views_last),
            float(shares_last),
            float(g.degree(root)),
            float(clustering_coefficient(g, shares.keys())),
            float(len(regions)),
        ),
    )


def label_level(final_popularity: int, thresholds: Sequence[float]) -> int:
    """Ordinal level: 1 plus the number of thresholds strictly below."""
    if not thresholds:
        raise ConfigError("thresholds must be non-empty")
    if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise ConfigError("thresholds must be strictly ascending")
    return 1 + sum(1 for t in thresholds if t < final_popularity)


def thresholds_from_quantiles(popularities: Sequence[int],
                              quantiles: Sequence[float]) -> list[float]:
    """Corpus-quantile thresholds (e.g. [0.7, 0.98] for the top-2% band)."""
    if not popularities:
        raise ConfigError("empty popularity list")
    if any(not 0.0 < q < 1.0 for q in quantiles):
        raise ConfigError("quantiles must be in (0,1)")
    values = [float(np.quantile(popularities, q)) for q in quantiles]
    # Collapse ties so label_level sees strictly ascending thresholds.
    out: list[float] = []
    for v in values:
        out.append(v if not out or v > out[-1] else out[-1] + 0.5)
    return out


@dataclass(frozen=True)
class Decision:
    action: str
    level: int | None = None
    age_committed: int | None = None

    @classmethod
    def wait(cls) -> "Decision":
        return cls(WAIT)

    @classmethod
    def commit(cls, level: int, age: int) -> "Decision":
        return cls(COMMIT, level, age)

    @property
    def committed(self) -> bool:
        return self.action == COMMIT


def prediction_reward(decision: Decision, true_level: int, horizon: int) -> float:
    """Accuracy times linear timeliness, in [0,1]; requires a COMMIT."""
    if not decision.committed:
        raise ValueError("prediction_reward requires a COMMIT decision")
    if not 1 <= decision.age_committed <= horizon:
        raise ValueError("age_committed outside 1..horizon")
    if decision.level != true_level:
        return 0.0
    return (horizon - decision.age_committed + 1) / horizon


class OnlineModel:
    """Per-age hypercube partition with majority vote and exploration.

    Each dimension is normalized by a fixed corpus-level bound and split
    into bins_per_dim equal bins. Cells below the exploration threshold
    give WAIT; explored cells commit their majority level once its
    empirical confidence clears the floor. At the horizon the model
    always commits, falling back to the age-global majority for cells it
    has never seen. Ties always break to the lower level.
    """

    def __init__(self, n_levels: int, horizon_ages: int,
                 feature_bounds: Sequence[float], bins_per_dim: int = 4,
                 exploration_threshold: int = 3, confidence_floor: float = 0.6):
        if n_levels < 2:
            raise ConfigError("n_levels must be >= 2")
        if horizon_ages < 1:
            raise ConfigError("horizon_ages must be >= 1")
        if len(feature_bounds) != N_FEATURES or any(b <= 0 for b in feature_bounds):
            raise ConfigError(f"feature_bounds must be {N_FEATURES} positive values")
        if bins_per_dim < 1:
            raise ConfigError("bins_per_dim must be >= 1")
        if exploration_threshold < 1:
            raise ConfigError("exploration_threshold must be >= 1")
        if not 0.0 <= confidence_floor <= 1.0:
            raise ConfigError("confidence_floor must be in [0,1]")
        self.n_levels = n_levels
        self.horizon_ages = horizon_ages
        self.bounds = tuple(float(b) for b in feature_bounds)
        self.bins_per_dim = bins_per_dim
        self.exploration_threshold = exploration_threshold
        self.confidence_floor = confidence_floor
        self._cells: dict[int, dict[tuple[int, ...], np.ndarray]] = {}
        self._age_totals: dict[int, np.ndarray] = {}

    def cell_key(self, x: FeatureVector) -> tuple[int, ...]:
        key = []
        for d, bound in zip(x.dims, self.bounds):
            frac = min(d / bound, 1.0)
            key.append(min(int(frac * self.bins_per_dim), self.bins_per_dim - 1))
        return tuple(key)

    def cell_counts(self, x: FeatureVector) -> np.ndarray:
        """Level counts of the cell containing x at its age (a copy)."""
        counts = self._cells.get(x.age, {}).get(self.cell_key(x))
        if counts is None:
            return np.zeros(self.n_levels, dtype=np.int64)
        return counts.copy()

    def _majority(self, counts: np.ndarray) -> int:
        return int(np.argmax(counts)) + 1  # argmax takes the first max: lower level

    def decide(self, x: FeatureVector) -> Decision:
        """WAIT or COMMIT for the cascade prefix feature x."""
        if x.age > self.horizon_ages:
            raise ValueError(f"age {x.age} beyond prediction horizon {self.horizon_ages}")
        at_horizon = x.age == self.horizon_ages
        counts = self._cells.get(x.age, {}).get(self.cell_key(x))
        n = int(counts.sum()) if counts is not None else 0
        if n < self.exploration_threshold:
            if at_horizon:
                total = self._age_totals.get(x.age)
                level = self._majority(total) if total is not None else 1
                return Decision.commit(level, x.age)
            return Decision.wait()
        majority = self._majority(counts)
        confidence = counts[majority - 1] / n
        if confidence >= self.confidence_floor or at_horizon:
            return Decision.commit(majority, x.age)
        return Decision.wait()

    def update(self, x: FeatureVector, true_level: int) -> None:
        """Increment the (age, cell, level) counter; touches nothing else."""
        if not 1 <= true_level <= self.n_levels:
            raise ValueError(f"level {true_level} outside 1..{self.n_levels}")
        cells = self._cells.setdefault(x.age, {})
        key = self.cell_key(x)
        counts = cells.get(key)
        if counts is None:
            counts = cells[key] = np.zeros(self.n_levels, dtype=np.int64)
        counts[true_level - 1] += 1
        totals = self._age_totals.get(x.age)
        if totals is None:
            totals = self._age_totals[x.age] = np.zeros(self.n_levels, dtype=np.int64)
        totals[true_level - 1] += 1


def feature_bounds(features: Iterable[FeatureVector]) -> tuple[float, ...]:
    """Per-dimension corpus maxima (floored at 1) for cell normalization."""
    bounds = np.ones(N_FEATURES)
    for x in features:
        bounds = np.maximum(bounds, x.dims)
    return tuple(float(b) for b in bounds)


def baseline_view_predictor(x: FeatureVector,
                            view_thresholds: Mapping[int, Sequence[float]]) -> Decision:
    """Commit the level whose view band contains cumulative views at x.age."""
    row = view_thresholds.get(x.age)
    if row is None:
        raise ConfigError(f"no view-threshold row for age {x.age}")
    level = 1 + sum(1 for t in row if t < x.views_total)
    return Decision.commit(level, x.age)


class PredictionRow(NamedTuple):
    video: int
    commit_age: int
    predicted_level: int
    true_level: int
    reward: float


def replay_predictions(model: OnlineModel,
                       corpus: Sequence[tuple[int, Mapping[int, FeatureVector], int]],
                       ) -> list[PredictionRow]:
    """Single-pass online protocol over completed cascades.

    Each corpus entry is (video_id, features keyed by age, true_level),
    already in initiation order. A cascade is scored with the model as
    trained on all earlier cascades, then its ages are folded in.
    """
    rows: list[PredictionRow] = []
    for video_id, by_age, true_level in corpus:
        decision = None
        for age in range(1, model.horizon_ages + 1):
            decision = model.decide(by_age[age])
            if decision.committed:
                break
        assert decision is not None and decision.committed
        reward = prediction_reward(decision, true_level, model.horizon_ages)
        rows.append(PredictionRow(video_id, decision.age_committed,
                                  decision.level, true_level, reward))
        for age in range(1, model.horizon_ages + 1):
            model.update(by_age[age], true_level)
    return rows


def replay_baseline(corpus: Sequence[tuple[int, Mapping[int, FeatureVector], int]],
                    view_thresholds: Mapping[int, Sequence[float]],
                    commit_age: int, horizon: int) -> list[PredictionRow]:
    """Score the view-threshold baseline at its fixed commit age."""
    rows: list[PredictionRow] = []
    for video_id, by_age, true_level in corpus:
        decision = baseline_view_predictor(by_age[commit_age], view_thresholds)
        reward = prediction_reward(decision, true_level, horizon)
        rows.append(PredictionRow(video_id, decision.age_committed,
                                  decision.level, true_level, reward))
    return rows


def view_threshold_table(corpus: Sequence[tuple[int, Mapping[int, FeatureVector], int]],
                         quantiles: Sequence[float], ages: Iterable[int]) -> dict[int, list[float]]:
    """Per-age view thresholds at the corpus view quantiles."""
    table: dict[int, list[float]] = {}
    for age in ages:
        views = [by_age[age].views_total for _, by_age, _ in corpus if age in by_age]
        if not views:
            raise ConfigError(f"no corpus features at age {age}")
        table[age] = [float(np.quantile(views, q)) for q in quantiles]
    return table
