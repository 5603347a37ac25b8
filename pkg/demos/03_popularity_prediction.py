"""Online multi-level popularity prediction versus a view-count baseline.

Runs the full scenario pipeline, then inspects the prediction reports:
the online model partitions per-age feature space into cells and commits
a popularity level once a cell is confident, trading accuracy against
earliness. The baseline thresholds cumulative views at a fixed age.
"""

import numpy as np

from socialcast.config import (GraphConfig, PredictionConfig, PropagationConfig,
                               ScenarioConfig, VideoConfig)
from socialcast.runner import simulate

cfg = ScenarioConfig(
    seed=3, horizon_slots=160,
    graph=GraphConfig(n_users=1200, n_regions=10, triad_prob=0.8,
                      homophily_scale_km=5.0),
    propagation=PropagationConfig(p_watch=0.85, p_share=0.22),
    videos=VideoConfig(count=300),
    prediction=PredictionConfig(levels=3, quantiles=(0.7, 0.98), horizon_ages=24,
                                exploration_threshold=3, confidence_floor=0.65,
                                baseline_commit_age=6))
print("simulating 300 cascades and replaying predictions...")
result = simulate(cfg)

print(f"\npopularity levels (thresholds {['%.1f' % t for t in result.thresholds]}):")
for level in (1, 2, 3):
    n = sum(1 for lv in result.levels.values() if lv == level)
    print(f"  level {level}: {n} videos")

for report in (result.prediction_online, result.prediction_baseline):
    rows = report.rows
    accuracy = np.mean([r.predicted_level == r.true_level for r in rows])
    commit_age = np.mean([r.commit_age for r in rows])
    print(f"\n{report.strategy}:")
    print(f"  mean reward      {report.mean_reward:.3f}")
    print(f"  accuracy         {accuracy:.3f}")
    print(f"  mean commit age  {commit_age:.1f} slots")

online = result.prediction_online
print("\nreward improves as the model sees more cascades:")
for lo, hi in ((0, 100), (100, 200), (200, 300)):
    chunk = [r.reward for r in online.rows if lo <= r.video < hi]
    print(f"  videos {lo:3d}-{hi - 1:3d}: mean reward {np.mean(chunk):.3f}")

print("""
Note: on this corpus cumulative views are themselves predictive (views
largely *are* popularity), so the view baseline is a strong opponent and
the online model's edge is earliness, not accuracy. The separation in
favor of context features appears when early views are uninformative;
see tests/test_acceptance.py::test_criterion_8_prediction_reward_direction
for a corpus constructed that way.""")
