"""Scenario configuration: strict JSON schema, canonical hashing.

Unknown keys are hard errors so typos cannot silently fall back to
defaults. Errors name the offending field path.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

from .errors import ConfigError

REPLICATION_STRATEGIES = ("static", "influence-index", "oracle")
D2D_MODES = ("off", "flood", "coverage")


def _build(cls, data: dict, path: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected an object")
    known = {f.name for f in fields(cls)}
    for key in data:
        if key not in known:
            raise ConfigError(f"{path}.{key}: unknown key")
    kwargs = {}
    for f in fields(cls):
        if f.name not in data:
            continue
        value = data[f.name]
        sub = f.metadata.get("sub")
        if sub is not None and value is not None:
            value = _build(sub, value, f"{path}.{f.name}")
        elif f.metadata.get("tuple") and value is not None:
            value = tuple(value)
        kwargs[f.name] = value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


@dataclass(frozen=True)
class GraphConfig:
    n_users: int = 600
    n_regions: int = 8
    edges_per_node: int = 3
    triad_prob: float = 0.6
    area_side_km: float = 100.0
    homophily_scale_km: float = 10.0
    login_prob: tuple[float, float] = field(default=(0.4, 0.9), metadata={"tuple": True})
    storage_slots: int = 20
    bandwidth_units: int = 8

    def validate(self) -> None:
        if self.n_users < 1:
            raise ConfigError("graph.n_users must be >= 1")
        if self.n_regions < 1:
            raise ConfigError("graph.n_regions must be >= 1")
        if self.homophily_scale_km <= 0:
            raise ConfigError("graph.homophily_scale_km must be positive")


@dataclass(frozen=True)
class GraphFilesConfig:
    """Load the graph from trace files instead of generating it."""

    edges: str = ""
    users: str = ""
    regions: str = ""

    def validate(self) -> None:
        if not (self.edges and self.users and self.regions):
            raise ConfigError("graph_files needs edges, users and regions paths")


@dataclass(frozen=True)
class PropagationConfig:
    p_watch: float = 0.55
    p_share: float = 0.35
    lag_shape: float = 1.5070
    lag_max: int = 48

    def validate(self) -> None:
        if not 0 <= self.p_watch <= 1 or not 0 <= self.p_share <= 1:
            raise ConfigError("propagation probabilities must be in [0,1]")
        if self.lag_shape <= 1:
            raise ConfigError("propagation.lag_shape must be > 1")
        if self.lag_max < 1:
            raise ConfigError("propagation.lag_max must be >= 1")


@dataclass(frozen=True)
class VideoConfig:
    count: int = 40
    size_units: int = 1

    def validate(self) -> None:
        if self.count < 1:
            raise ConfigError("videos.count must be >= 1")
        if self.size_units < 1:
            raise ConfigError("videos.size_units must be >= 1")


@dataclass(frozen=True)
class PredictionConfig:
    levels: int = 3
    quantiles: tuple[float, ...] = field(default=(0.7, 0.98), metadata={"tuple": True})
    thresholds: tuple[float, ...] | None = field(default=None, metadata={"tuple": True})
    horizon_ages: int = 24
    exploration_threshold: int = 3
    confidence_floor: float = 0.6
    bins_per_dim: int = 4
    baseline_commit_age: int = 6

    def validate(self) -> None:
        if self.levels < 2:
            raise ConfigError("prediction.levels must be >= 2")
        if self.thresholds is None and len(self.quantiles) != self.levels - 1:
            raise ConfigError("prediction.quantiles must have levels-1 entries")
        if self.thresholds is not None and len(self.thresholds) != self.levels - 1:
            raise ConfigError("prediction.thresholds must have levels-1 entries")
        if self.horizon_ages < 1:
            raise ConfigError("prediction.horizon_ages must be >= 1")
        if not 1 <= self.baseline_commit_age <= self.horizon_ages:
            raise ConfigError("prediction.baseline_commit_age outside 1..horizon_ages")


@dataclass(frozen=True)
class DeliveryConfig:
    replication: str = "influence-index"
    c1: float = 1.2
    c2: float = 2.0
    fit_coefficients: bool = False  # refit c1/c2 on this scenario's cascades
    cost_local: float = 1.0
    cost_peer: float = 2.0
    cost_origin: float = 10.0
    peer_serving: bool = True
    retention_slots: int = 24

    def validate(self) -> None:
        if self.replication not in REPLICATION_STRATEGIES:
            raise ConfigError(
                f"delivery.replication must be one of {REPLICATION_STRATEGIES}")
        if self.c1 <= 0 or self.c2 <= 0:
            raise ConfigError("delivery.c1 and delivery.c2 must be positive")
        if self.retention_slots < 0:
            raise ConfigError("delivery.retention_slots must be >= 0")


@dataclass(frozen=True)
class D2DConfig:
    mode: str = "off"
    carrier_budget: int = 3
    fanout: int = 2
    energy_budget: int = 20
    device_capacity: int = 4
    dwell_mean: float = 6.0
    mobility_scale_km: float = 50.0
    lookahead: int = 24

    def validate(self) -> None:
        if self.mode not in D2D_MODES:
            raise ConfigError(f"d2d.mode must be one of {D2D_MODES}")
        if self.carrier_budget < 1:
            raise ConfigError("d2d.carrier_budget must be >= 1")
        if self.fanout < 0:
            raise ConfigError("d2d.fanout must be >= 0")
        if self.dwell_mean < 1:
            raise ConfigError("d2d.dwell_mean must be >= 1")
        if self.lookahead < 1:
            raise ConfigError("d2d.lookahead must be >= 1")


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int = 1
    horizon_slots: int = 120
    graph: GraphConfig = field(default_factory=GraphConfig, metadata={"sub": GraphConfig})
    graph_files: GraphFilesConfig | None = field(default=None, metadata={"sub": GraphFilesConfig})
    propagation: PropagationConfig = field(default_factory=PropagationConfig,
                                           metadata={"sub": PropagationConfig})
    videos: VideoConfig = field(default_factory=VideoConfig, metadata={"sub": VideoConfig})
    prediction: PredictionConfig = field(default_factory=PredictionConfig,
                                         metadata={"sub": PredictionConfig})
    delivery: DeliveryConfig = field(default_factory=DeliveryConfig,
                                     metadata={"sub": DeliveryConfig})
    d2d: D2DConfig = field(default_factory=D2DConfig, metadata={"sub": D2DConfig})

    def validate(self) -> None:
        if self.horizon_slots < 0:
            raise ConfigError("horizon_slots must be >= 0")
        self.graph.validate()
        if self.graph_files is not None:
            self.graph_files.validate()
        self.propagation.validate()
        self.videos.validate()
        self.prediction.validate()
        self.delivery.validate()
        self.d2d.validate()
        if self.horizon_slots and self.horizon_slots <= self.prediction.horizon_ages:
            raise ConfigError(
                "horizon_slots must exceed prediction.horizon_ages so every "
                "video has a full prediction window")

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        def unwrap(obj):
            if dataclasses.is_dataclass(obj):
                return {f.name: unwrap(getattr(obj, f.name)) for f in fields(obj)}
            if isinstance(obj, tuple):
                return list(obj)
            return obj
        return unwrap(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        cfg = _build(cls, data, "config")
        cfg.validate()
        return cfg


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    return ScenarioConfig.from_dict(data)


def save_config(cfg: ScenarioConfig, path) -> None:
    Path(path).write_text(canonical_json(cfg) + "\n")


def canonical_json(cfg: ScenarioConfig) -> str:
    return json.dumps(cfg.to_dict(), sort_keys=True, separators=(",", ":"))


def config_hash(cfg: ScenarioConfig) -> str:
    return hashlib.sha256(canonical_json(cfg).encode()).hexdigest()


def scenario_id(cfg: ScenarioConfig) -> str:
    return f"{config_hash(cfg)[:12]}-s{cfg.seed}"
