"""socialcast: social video propagation and delivery simulation.

A deterministic discrete-event simulator of video cascades over a
region-annotated social graph (an extended SIR process with zipf
re-share lags), coupled to social-aware delivery: edge-cloud replication
driven by the geographic influence index, peer and device-to-device
crowdsourced caching with mobility prediction, online multi-level
popularity prediction, and an analysis toolchain that reproduces the
empirical propagation signatures and compares delivery strategies.
"""

__version__ = "0.1.0"

from .graph import (GraphGenParams, Region, SocialGraph, User,  # noqa: F401
                    clustering_coefficient, generate_graph, load_graph,
                    region_distance)
from .propagation import (PropagationParams, PropagationTree, Video,  # noqa: F401
                          init_share, run_cascade, sample_reshare_lag, step)
from .propagation import popularity as tree_popularity  # noqa: F401
# "popularity" at the package root refers to the prediction submodule;
# the tree-size function is exported as tree_popularity.
from .popularity import (Decision, FeatureVector, OnlineModel,  # noqa: F401
                         baseline_view_predictor, extract_features, label_level,
                         prediction_reward)
from .delivery import (EdgeServer, PeerIndex, ReplicaMap, ServeCosts,  # noqa: F401
                       Source, evict, fit_c1_c2, geo_influence_index,
                       replication_decision, serve)
from .d2d import (DeviceCache, MobilityModel, MobilityTrace,  # noqa: F401
                  d2d_step, flood_baseline, predict_mobility,
                  predict_recipients, select_carriers)
from .analysis import (DistanceCDF, LagHistogram, StrategyReport,  # noqa: F401
                       distance_cdf, fig2_experiment, fit_zipf,
                       rank_correlation, strategy_report)
from .config import ScenarioConfig, load_config  # noqa: F401
from .runner import compare_strategies, run_scenario, simulate  # noqa: F401
