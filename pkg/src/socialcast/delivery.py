"""Hybrid edge-cloud plus peer-assisted delivery overlay.

Each region owns an edge server with storage and per-slot bandwidth
limits. Replica placement is driven by the geographic influence index
g = c1 * ln(c2 * s), the predicted number of regions a video spreads to
given its propagation size in the previous slot. Requests are served
with source priority LOCAL_EDGE > PEER > ORIGIN; the origin always
succeeds as fallback.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .errors import CapacityError, ConfigError, FitError


class Source(str, Enum):
    LOCAL_EDGE = "LOCAL_EDGE"
    PEER = "PEER"
    ORIGIN = "ORIGIN"


@dataclass(frozen=True)
class ServeCosts:
    """Cost units per served request; only the ratios matter."""

    local_edge: float = 1.0
    peer: float = 2.0
    origin: float = 10.0

    def of(self, source: Source) -> float:
        return {Source.LOCAL_EDGE: self.local_edge,
                Source.PEER: self.peer,
                Source.ORIGIN: self.origin}[source]


@dataclass(frozen=True)
class RequestEvent:
    slot: int
    user: int
    video: int


@dataclass(frozen=True)
class ServeOutcome:
    source: Source
    cost: float
    region: int
    peer: int | None = None


class EdgeServer:
    """Per-region cache with storage slots and per-slot bandwidth units."""

    def __init__(self, region: int, storage_slots: int, bandwidth_units: int):
        if storage_slots < 0 or bandwidth_units < 0:
            raise ConfigError("server capacities must be nonnegative")
        self.region = region
        self.storage_slots = storage_slots
        self.bandwidth_units = bandwidth_units
        self.cache: dict[int, int] = {}  # video -> size units
        self.last_used: dict[int, int] = {}  # video -> last insert/serve slot
        self._slot: int | None = None
        self._served_this_slot = 0

    @property
    def used_space(self) -> int:
        return sum(self.cache.values())

    @property
    def free_space(self) -> int:
        return self.storage_slots - self.used_space

    def begin_slot(self, slot: int) -> None:
        self._slot = slot
        self._served_this_slot = 0

    def holds(self, video: int) -> bool:
        return video in self.cache

    def can_serve(self) -> bool:
        return self._served_this_slot < self.bandwidth_units

    def serve_hit(self, video: int, slot: int) -> None:
        if not self.holds(video):
            raise CapacityError(f"server {self.region} does not cache video {video}")
        if not self.can_serve():
            raise CapacityError(f"server {self.region} out of bandwidth at slot {slot}")
        self._served_this_slot += 1
        self.last_used[video] = slot

    def insert(self, video: int, size: int, slot: int) -> list[int]:
        """Cache a video, evicting LRU entries if needed; returns evictions."""
        if video in self.cache:
            return []
        if size > self.storage_slots:
            raise CapacityError(
                f"video {video} (size {size}) exceeds server {self.region} "
                f"capacity {self.storage_slots}")
        evicted = evict(self, size, slot, keep=video)
        self.cache[video] = size
        self.last_used[video] = slot
        return evicted


def evict(server: EdgeServer, needed: int, slot: int, keep: int | None = None) -> list[int]:
    """Free at least `needed` units, least-recently-served first.

    Ties break to the lower video id; the video named by `keep` is never
    evicted. Raises CapacityError when `needed` exceeds total capacity.
    """
    if needed > server.storage_slots:
        raise CapacityError(f"need {needed} > capacity {server.storage_slots}")
    evicted: list[int] = []
    if needed <= 0 or server.free_space >= needed:
        return evicted
    order = sorted((vid for vid in server.cache if vid != keep),
                   key=lambda vid: (server.last_used.get(vid, -1), vid))
    for vid in order:
        if server.free_space >= needed:
            break
        server.cache.pop(vid)
        server.last_used.pop(vid, None)
        evicted.append(vid)
    if server.free_space < needed:
        raise CapacityError(f"cannot free {needed} units on server {server.region}")
    return evicted


class ReplicaMap:
    """Which regions hold which videos, with an append-only change history."""

    def __init__(self):
        self._placements: dict[int, set[int]] = {}
        self.history: list[tuple[int, int, int, str]] = []  # slot, video, region, action

    def ensure_entry(self, video: int) -> None:
        self._placements.setdefault(video, set())

    def regions_of(self, video: int) -> set[int]:
        return set(self._placements.get(video, ()))

    def add(self, video: int, region: int, slot: int) -> None:
        self._placements.setdefault(video, set()).add(region)
        self.history.append((slot, video, region, "ADD"))

    def remove(self, video: int, region: int, slot: int) -> None:
        self._placements.get(video, set()).discard(region)
        self.history.append((slot, video, region, "EVICT"))


def geo_influence_index(s_prev: int, c1: float, c2: float) -> float:
    """c1 * ln(c2 * s_prev), with the never-shared convention g(0) = 0."""
    if c1 <= 0 or c2 <= 0:
        raise ConfigError("c1 and c2 must be positive")
    if s_prev < 0:
        raise ConfigError("s_prev must be >= 0")
    if s_prev == 0:
        return 0.0
    return c1 * math.log(c2 * s_prev)


def replication_decision(video: int, g_index: float, replica_map: ReplicaMap,
                         demand: Mapping[int, int], servers: Mapping[int, EdgeServer],
                         size: int, slot: int) -> list[int]:
    """Add replicas until the region count reaches ceil(g_index).

    New regions are the uncached ones with the highest current
    susceptible-user counts for the video, ties to the lower region id.
    Insertions evict LRU entries when a server is full; regions that can
    never fit the video are skipped. Idempotent within a slot.
    """
    replica_map.ensure_entry(video)
    current = replica_map.regions_of(video)
    target = math.ceil(g_index)
    if target <= len(current):
        return []
    candidates = sorted(
        (r for r in servers if r not in current and servers[r].storage_slots >= size),
        key=lambda r: (-demand.get(r, 0), r))
    added: list[int] = []
    for region in candidates[: target - len(current)]:
        evicted = servers[region].insert(video, size, slot)
        for vid in evicted:
            replica_map.remove(vid, region, slot)
        replica_map.add(video, region, slot)
        added.append(region)
    return added


class PeerIndex:
    """Device copies held by users, servable to same-region requesters.

    Viewer copies expire after the retention window; copies registered
    as persistent (e.g. crowdsourced carriers) do not. Each user uploads
    to at most one peer per slot.
    """

    def __init__(self, retention_slots: int | None = 24, enabled: bool = True):
        if retention_slots is not None and retention_slots < 0:
            raise ConfigError("retention_slots must be nonnegative")
        self.retention_slots = retention_slots
        self.enabled = enabled
        self._copies: dict[int, dict[int, int | None]] = {}  # video -> user -> expiry
        self._upload_at: dict[int, int] = {}

    def add_viewer_copy(self, user: int, video: int, slot: int) -> None:
        if not self.enabled:
            return
        expiry = None if self.retention_slots is None else slot + self.retention_slots
        self._copies.setdefault(video, {})[user] = expiry

    def add_persistent_copy(self, user: int, video: int) -> None:
        self._copies.setdefault(video, {})[user] = None

    def holders(self, video: int, slot: int) -> list[int]:
        holders = self._copies.get(video, {})
        return sorted(u for u, exp in holders.items() if exp is None or slot <= exp)

    def find_peer(self, video: int, region: int, slot: int,
                  positions: Mapping[int, int], exclude: int) -> int | None:
        if not self.enabled:
            return None
        for user in self.holders(video, slot):
            if user == exclude:
                continue
            if positions.get(user) != region:
                continue
            if self._upload_at.get(user) == slot:
                continue
            return user
        return None

    def consume_upload(self, user: int, slot: int) -> None:
        self._upload_at[user] = slot


def serve(req: RequestEvent, replica_map: ReplicaMap, servers: Mapping[int, EdgeServer],
          peer_index: PeerIndex, positions: Mapping[int, int],
          costs: ServeCosts = ServeCosts()) -> ServeOutcome:
    """Serve one request with priority LOCAL_EDGE > PEER > ORIGIN."""
    region = positions[req.user]
    server = servers.get(region)
    if (server is not None and region in replica_map.regions_of(req.video)
            and server.holds(req.video) and server.can_serve()):
        server.serve_hit(req.video, req.slot)
        return ServeOutcome(Source.LOCAL_EDGE, costs.of(Source.LOCAL_EDGE), region)
    peer = peer_index.find_peer(req.video, region, req.slot, positions, exclude=req.user)
    if peer is not None:
        peer_index.consume_upload(peer, req.slot)
        return ServeOutcome(Source.PEER, costs.of(Source.PEER), region, peer=peer)
    return ServeOutcome(Source.ORIGIN, costs.of(Source.ORIGIN), region)


def fit_c1_c2(samples: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Least-squares fit of observed region counts to c1 * ln(c2 * s).

    The model is linear in ln(s): slope c1, intercept c1 * ln(c2).
    Requires at least two samples with s >= 1, non-degenerate s values,
    and a positive fitted slope.
    """
    usable = [(s, y) for s, y in samples if s >= 1]
    if len(usable) < 2:
        raise FitError("need at least 2 samples with s_prev >= 1")
    if any(y < 1 for _, y in usable):
        raise FitError("observed region counts must be >= 1")
    xs = np.log([s for s, _ in usable])
    ys = np.array([y for _, y in usable], dtype=float)
    if np.ptp(xs) == 0:
        raise FitError("degenerate samples: all s_prev equal")
    slope, intercept = np.polyfit(xs, ys, 1)
    if slope <= 0:
        raise FitError(f"non-positive slope {slope:.4g}: data inconsistent with the model")
    return float(slope), float(math.exp(intercept / slope))
