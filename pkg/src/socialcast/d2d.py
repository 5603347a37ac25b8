"""Mobility-aware crowdsourced device caching.

Users move between regions under per-user Markov chains with geometric
dwell times. Carriers are chosen by greedy weighted coverage of the
predicted (region, activation-window) recipient mass, so content is
physically transported to where predicted viewers will be. A random
flooding baseline replicates to co-located users instead. Co-location
means same region in the same slot.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import CapacityError, ConfigError, IntegrityError, ParseError
from .graph import SocialGraph, region_distance


@dataclass
class MobilityModel:
    """Per-user region transition matrices plus geometric dwell means."""

    region_ids: tuple[int, ...]
    matrices: dict[int, np.ndarray]  # user -> (R x R), rows sum to 1
    dwell_mean: dict[int, float]

    def __post_init__(self):
        n = len(self.region_ids)
        for user, mat in self.matrices.items():
            if mat.shape != (n, n):
                raise ConfigError(f"user {user}: matrix shape {mat.shape} != ({n},{n})")
            if not np.allclose(mat.sum(axis=1), 1.0, atol=1e-9):
                raise ConfigError(f"user {user}: transition rows must sum to 1")
        for user, mean in self.dwell_mean.items():
            if mean < 1:
                raise ConfigError(f"user {user}: dwell mean must be >= 1")

    def index_of(self, region: int) -> int:
        return self.region_ids.index(region)


def generate_mobility_model(g: SocialGraph, users: Iterable[int],
                            dwell_mean: float, mobility_scale_km: float) -> MobilityModel:
    """Distance-decayed jump chain shared by the given users.

    After a dwell expires the user jumps to another region with
    probability proportional to exp(-d/mobility_scale_km); with a single
    region the chain is the identity.
    """
    if dwell_mean < 1:
        raise ConfigError("dwell_mean must be >= 1")
    if mobility_scale_km <= 0:
        raise ConfigError("mobility_scale_km must be positive")
    region_ids = tuple(sorted(g.regions))
    n = len(region_ids)
    mat = np.zeros((n, n))
    if n == 1:
        mat[0, 0] = 1.0
    else:
        for i, ri in enumerate(region_ids):
            for j, rj in enumerate(region_ids):
                if i != j:
                    d = region_distance(g.regions[ri], g.regions[rj])
                    mat[i, j] = math.exp(-d / mobility_scale_km)
            mat[i] /= mat[i].sum()
    matrices = {u: mat for u in users}
    means = {u: float(dwell_mean) for u in matrices}
    return MobilityModel(region_ids, matrices, means)


class MobilityTrace:
    """Per-user contiguous (region, enter, leave) segments over a horizon.

    Intervals are half-open: the user is in `region` for slots
    enter <= t < leave.
    """

    def __init__(self, segments: Mapping[int, Sequence[tuple[int, int, int]]], horizon: int):
        self.horizon = horizon
        self.segments: dict[int, list[tuple[int, int, int]]] = {}
        for user, segs in segments.items():
            segs = list(segs)
            prev_leave = None
            for region, enter, leave in segs:
                if leave <= enter:
                    raise IntegrityError(f"user {user}: empty segment ({enter},{leave})")
                if prev_leave is not None and enter != prev_leave:
                    raise IntegrityError(f"user {user}: segments not contiguous at {enter}")
                prev_leave = leave
            self.segments[user] = segs

    def region_at(self, user: int, slot: int) -> int:
        for region, enter, leave in self.segments[user]:
            if enter <= slot < leave:
                return region
        raise KeyError(f"user {user} has no segment covering slot {slot}")

    def positions_at(self, slot: int) -> dict[int, int]:
        return {user: self.region_at(user, slot) for user in self.segments}

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("user_id", "region_id", "enter_slot", "leave_slot"))
            for user in sorted(self.segments):
                for region, enter, leave in self.segments[user]:
                    w.writerow((user, region, enter, leave))

    @classmethod
    def from_csv(cls, path, horizon: int) -> "MobilityTrace":
        segments: dict[int, list[tuple[int, int, int]]] = {}
        path = Path(path)
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["user_id", "region_id", "enter_slot", "leave_slot"]:
                raise ParseError(path, 1, "expected header user_id,region_id,enter_slot,leave_slot")
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    user, region, enter, leave = (int(c) for c in row)
                except ValueError as exc:
                    raise ParseError(path, lineno, str(exc)) from exc
                segments.setdefault(user, []).append((region, enter, leave))
        return cls(segments, horizon)


def generate_traces(model: MobilityModel, start_regions: Mapping[int, int],
                    horizon: int, rng: np.random.Generator) -> MobilityTrace:
    """Sample region visit sequences for every user in the model."""
    if horizon < 1:
        raise ConfigError("horizon must be >= 1")
    segments: dict[int, list[tuple[int, int, int]]] = {}
    for user in sorted(model.matrices):
        mat = model.matrices[user]
        mean = model.dwell_mean[user]
        p = 1.0 / mean
        idx = model.index_of(start_regions[user])
        t = 0
        segs: list[tuple[int, int, int]] = []
        while t < horizon:
            dwell = int(rng.geometric(p))
            leave = min(t + dwell, horizon)
            segs.append((model.region_ids[idx], t, leave))
            t = leave
            if t < horizon:
                idx = int(rng.choice(len(model.region_ids), p=mat[idx]))
        # Merge self-jumps so segments stay minimal.
        merged = [segs[0]]
        for region, enter, leave in segs[1:]:
            pr, pe, pl = merged[-1]
            if region == pr:
                merged[-1] = (pr, pe, leave)
            else:
                merged.append((region, enter, leave))
        segments[user] = merged
    return MobilityTrace(segments, horizon)


def predict_mobility(model: MobilityModel, user: int, current_region: int,
                     lookahead: int, now: int = 0) -> list[tuple[int, int, int]]:
    """Most probable region path within the lookahead window.

    Returns (region, expected arrival slot, expected dwell slots) entries
    starting from the current region. Hops land every dwell-mean slots;
    the path maximizes the product of transition probabilities (Viterbi),
    with ties broken toward lower region indices. Deterministic.
    """
    if lookahead < 1:
        raise ConfigError("lookahead must be >= 1")
    if user not in model.matrices:
        raise KeyError(f"user {user} absent from mobility model")
    mat = model.matrices[user]
    mean = model.dwell_mean[user]
    n = len(model.region_ids)
    start = model.index_of(current_region)

    arrivals = [now]
    k = 1
    while int(round(k * mean)) <= lookahead:
        arrivals.append(now + int(round(k * mean)))
        k += 1
    hops = len(arrivals) - 1

    with np.errstate(divide="ignore"):
        logp = np.log(mat)
    best = np.full((hops + 1, n), -np.inf)
    back = np.zeros((hops + 1, n), dtype=int)
    best[0, start] = 0.0
    for h in range(1, hops + 1):
        for j in range(n):
            scores = best[h - 1] + logp[:, j]
            i = int(np.argmax(scores))  # first max: lower region index wins ties
            best[h, j] = scores[i]
            back[h, j] = i
    path = [0] * (hops + 1)
    path[hops] = int(np.argmax(best[hops]))
    for h in range(hops, 0, -1):
        path[h - 1] = back[h, path[h]]

    end = now + lookahead
    entries: list[tuple[int, int, int]] = []
    for h, idx in enumerate(path):
        arrival = arrivals[h]
        region = model.region_ids[idx]
        if entries and entries[-1][0] == region:
            continue
        nxt = next((arrivals[k] for k in range(h + 1, hops + 1)
                    if path[k] != idx), end + 1)
        entries.append((region, arrival, nxt - arrival))
    return entries


def path_covers(path: Sequence[tuple[int, int, int]], region: int, slot: int) -> bool:
    """Whether a predicted path places the user in `region` at `slot`."""
    return any(r == region and a <= slot < a + d for r, a, d in path)


def predict_recipients(susceptibles: Mapping[int, int], g: SocialGraph,
                       model: MobilityModel | None,
                       current_regions: Mapping[int, int],
                       lookahead: int, now: int) -> dict[tuple[int, int], int]:
    """Expected recipient mass per (region, activation slot) window.

    `susceptibles` maps each currently exposed user to its scheduled
    activation slot (the operator view of the propagation state). The
    user's region at activation comes from its predicted mobility path,
    or from its current region when no model is given.
    """
    out: dict[tuple[int, int], int] = {}
    for user in sorted(susceptibles):
        act = susceptibles[user]
        if not now < act <= now + lookahead:
            continue
        region = current_regions.get(user, g.users[user].home_region)
        if model is not None and user in model.matrices:
            path = predict_mobility(model, user, region, lookahead, now)
            for r, a, d in path:
                if a <= act < a + d:
                    region = r
                    break
        key = (region, act)
        out[key] = out.get(key, 0) + 1
    return out


@dataclass
class DeviceCache:
    """A user's device: cache capacity plus a relay-energy budget."""

    user: int
    capacity: int
    energy_budget: int
    holdings: dict[int, int] = field(default_factory=dict)  # video -> size
    relays_done: int = 0

    @property
    def used(self) -> int:
        return sum(self.holdings.values())

    def can_store(self, size: int) -> bool:
        return self.used + size <= self.capacity

    def store(self, video: int, size: int) -> None:
        if video in self.holdings:
            return
        if not self.can_store(size):
            raise CapacityError(f"device {self.user} cannot store video {video}")
        self.holdings[video] = size

    def holds(self, video: int) -> bool:
        return video in self.holdings

    @property
    def energy_left(self) -> int:
        return self.energy_budget - self.relays_done

    def use_relay(self) -> None:
        if self.energy_left <= 0:
            raise CapacityError(f"device {self.user} out of relay energy")
        self.relays_done += 1


@dataclass
class CarrierAssignment:
    """Selected carriers for one video plus their coverage records."""

    video: int
    carriers: list[int]
    records: list[tuple[int, int, int, int]]  # carrier, region, window slot, mass
    warning: bool = False

    @property
    def covered_mass(self) -> int:
        return sum(m for _, _, _, m in self.records)


def select_carriers(video: int, recipients: Mapping[tuple[int, int], int],
                    candidate_paths: Mapping[int, Sequence[tuple[int, int, int]]],
                    budget: int, caches: Mapping[int, DeviceCache],
                    size: int = 1) -> CarrierAssignment:
    """Greedy weighted maximum coverage of the recipient windows.

    Each round picks the candidate whose predicted presence covers the
    most still-uncovered recipient mass, ties to the lower user id,
    stopping at the carrier budget or full coverage. Candidates without
    device capacity are excluded; if none qualify the assignment is
    empty and flagged.
    """
    if budget < 1:
        raise ConfigError("carrier budget must be >= 1")
    eligible = {u: candidate_paths[u] for u in sorted(candidate_paths)
                if u in caches and caches[u].can_store(size)}
    if not eligible:
        return CarrierAssignment(video, [], [], warning=True)

    cover_sets = {
        u: frozenset(key for key in recipients if path_covers(path, *key))
        for u, path in eligible.items()
    }
    uncovered = dict(recipients)
    carriers: list[int] = []
    records: list[tuple[int, int, int, int]] = []
    while len(carriers) < budget and uncovered:
        best_user, best_gain = None, 0
        for u in sorted(eligible):
            if u in carriers:
                continue
            gain = sum(uncovered.get(key, 0) for key in cover_sets[u])
            if gain > best_gain:
                best_user, best_gain = u, gain
        if best_user is None:
            break
        carriers.append(best_user)
        for key in sorted(cover_sets[best_user]):
            mass = uncovered.pop(key, 0)
            if mass:
                records.append((best_user, key[0], key[1], mass))
    return CarrierAssignment(video, carriers, records)


class Delivery(NamedTuple):
    slot: int
    video: int
    carrier: int
    recipient: int
    region: int


class Replication(NamedTuple):
    slot: int
    video: int
    holder: int
    target: int
    region: int


def flood_baseline(video: int, holder: int, positions: Mapping[int, int],
                   fanout: int, rng: np.random.Generator,
                   caches: Mapping[int, DeviceCache], size: int, slot: int,
                   copy_budget: int | None = None) -> list[Replication]:
    """One slot of random flooding from a content holder.

    Replicates to up to `fanout` uniformly random co-located users with
    spare device capacity, never outside the holder's current region,
    and spends one relay-energy unit per copy.
    """
    if fanout < 0:
        raise ConfigError("fanout must be >= 0")
    region = positions.get(holder)
    if region is None or fanout == 0:
        return []
    holder_cache = caches[holder]
    candidates = sorted(
        u for u, r in positions.items()
        if r == region and u != holder and u in caches
        and not caches[u].holds(video) and caches[u].can_store(size))
    if not candidates:
        return []
    limit = min(fanout, len(candidates), holder_cache.energy_left)
    if copy_budget is not None:
        limit = min(limit, copy_budget)
    if limit <= 0:
        return []
    picks = rng.choice(len(candidates), size=limit, replace=False)
    events: list[Replication] = []
    for i in sorted(int(p) for p in picks):
        target = candidates[i]
        caches[target].store(video, size)
        holder_cache.use_relay()
        events.append(Replication(slot, video, holder, target, region))
    return events


def d2d_step(slot: int, requests: Sequence[tuple[int, int]],
             positions: Mapping[int, int], caches: Mapping[int, DeviceCache],
             upload_used: set[tuple[int, int]] | None = None) -> list[Delivery]:
    """Serve this slot's activated viewers from co-located device copies.

    `requests` holds (user, video) pairs for users who watch at this
    slot. A delivery needs a co-located carrier with the video, spare
    relay energy, and a free upload (one per carrier per slot); the
    lowest-id carrier wins. Returns the deliveries made.
    """
    used = upload_used if upload_used is not None else set()
    deliveries: list[Delivery] = []
    for user, video in sorted(requests):
        region = positions.get(user)
        if region is None:
            continue
        for carrier in sorted(caches):
            cache = caches[carrier]
            if carrier == user or not cache.holds(video):
                continue
            if positions.get(carrier) != region:
                continue
            if cache.energy_left <= 0 or (carrier, slot) in used:
                continue
            cache.use_relay()
            used.add((carrier, slot))
            deliveries.append(Delivery(slot, video, carrier, user, region))
            break
    return deliveries
