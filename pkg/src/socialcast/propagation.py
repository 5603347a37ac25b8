"""Extended-SIR cascade engine over discrete hourly timeslots.

A video import makes the initiator INFECTIOUS and exposes its friends.
Exposed (SUSCEPTIBLE) users act exactly once, after a zipf-distributed
activation lag that carries the end-to-end re-share delay: they watch
(INFECTED) with probability p_watch or decline (IMMUNE); watchers then
re-share (INFECTIOUS) with probability p_share or stop (RECOVERED).
INFECTED is an instantaneous intermediate state, so watch and share
resolve within one slot. Everything is deterministic per generator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import ConfigError
from .graph import SocialGraph


class State(Enum):
    SAFE = "SAFE"
    SUSCEPTIBLE = "SUSCEPTIBLE"
    INFECTED = "INFECTED"
    IMMUNE = "IMMUNE"
    RECOVERED = "RECOVERED"
    INFECTIOUS = "INFECTIOUS"


#: The only legal state transitions; everything else is a bug.
LEGAL_TRANSITIONS = frozenset({
    (State.SAFE, State.SUSCEPTIBLE),
    (State.SUSCEPTIBLE, State.INFECTED),
    (State.SUSCEPTIBLE, State.IMMUNE),
    (State.INFECTED, State.INFECTIOUS),
    (State.INFECTED, State.RECOVERED),
})

EVENT_INIT = "INIT"
EVENT_EXPOSE = "EXPOSE"
EVENT_WATCH = "WATCH"
EVENT_IMMUNE = "IMMUNE"
EVENT_SHARE = "SHARE"
EVENT_RECOVER = "RECOVER"

#: Event kind -> (from_state, to_state) for log-side legality checks.
EVENT_TRANSITIONS = {
    EVENT_EXPOSE: (State.SAFE, State.SUSCEPTIBLE),
    EVENT_WATCH: (State.SUSCEPTIBLE, State.INFECTED),
    EVENT_IMMUNE: (State.SUSCEPTIBLE, State.IMMUNE),
    EVENT_SHARE: (State.INFECTED, State.INFECTIOUS),
    EVENT_RECOVER: (State.INFECTED, State.RECOVERED),
}


class Event(NamedTuple):
    slot: int
    video: int
    user: int
    kind: str
    parent: int | None


@dataclass(frozen=True)
class Video:
    """A video identified by its initiation-order index."""

    id: int
    t_init: int
    initiator: int
    size_units: int = 1

    def __post_init__(self):
        if self.t_init < 0:
            raise ConfigError(f"video {self.id}: t_init must be >= 0")
        if self.size_units < 1:
            raise ConfigError(f"video {self.id}: size_units must be >= 1")


@dataclass(frozen=True)
class PropagationParams:
    p_watch: float
    p_share: float
    lag_shape: float = 1.5070
    lag_max: int = 48

    def __post_init__(self):
        if not 0.0 <= self.p_watch <= 1.0:
            raise ConfigError("p_watch must be in [0,1]")
        if not 0.0 <= self.p_share <= 1.0:
            raise ConfigError("p_share must be in [0,1]")
        if self.lag_shape <= 1.0:
            raise ConfigError("lag_shape must be > 1")
        if self.lag_max < 1:
            raise ConfigError("lag_max must be >= 1")


@lru_cache(maxsize=64)
def _lag_cdf(shape: float, max_lag: int) -> np.ndarray:
    weights = np.arange(1, max_lag + 1, dtype=float) ** (-shape)
    return np.cumsum(weights / weights.sum())


def reshare_lag_pmf(shape: float, max_lag: int) -> np.ndarray:
    """P(L = l) for l = 1..max_lag under the truncated zipf law."""
    if shape <= 1.0 or max_lag < 1:
        raise ConfigError("lag pmf requires shape > 1 and max_lag >= 1")
    weights = np.arange(1, max_lag + 1, dtype=float) ** (-shape)
    return weights / weights.sum()


def lag_mass_within(params: PropagationParams, window: int = 24) -> float:
    """Probability that a re-share lag falls within the first `window` slots."""
    pmf = reshare_lag_pmf(params.lag_shape, params.lag_max)
    return float(pmf[: min(window, params.lag_max)].sum())


def sample_reshare_lag(params: PropagationParams, rng: np.random.Generator) -> int:
    """One zipf lag draw in slots, always >= 1."""
    cdf = _lag_cdf(params.lag_shape, params.lag_max)
    return int(np.searchsorted(cdf, rng.random(), side="right")) + 1


def sample_reshare_lags(params: PropagationParams, rng: np.random.Generator,
                        size: int) -> np.ndarray:
    """Vectorized zipf lag draws."""
    cdf = _lag_cdf(params.lag_shape, params.lag_max)
    return np.searchsorted(cdf, rng.random(size), side="right") + 1


@dataclass
class PropagationState:
    """Mutable per-cascade state owned by a single event loop."""

    video: Video
    state: dict[int, State]
    since: dict[int, int]
    parent: dict[int, int] = field(default_factory=dict)
    activation: dict[int, int] = field(default_factory=dict)
    pending: dict[int, list[int]] = field(default_factory=dict)
    unscheduled: list[int] = field(default_factory=list)
    spreaders: set[int] = field(default_factory=set)
    receivers: set[int] = field(default_factory=set)
    share_time: dict[int, int] = field(default_factory=dict)
    view_time: dict[int, int] = field(default_factory=dict)
    events: list[Event] = field(default_factory=list)
    last_slot: int | None = None

    def population_counts(self) -> dict[State, int]:
        counts = {s: 0 for s in State}
        for s in self.state.values():
            counts[s] += 1
        return counts

    def exhausted(self) -> bool:
        """True once no future activation can occur."""
        return not self.pending and not self.unscheduled


@dataclass(frozen=True)
class PropagationTree:
    """The finished share tree of one cascade.

    spreaders includes the root; receivers are users who watched but did
    not re-share. horizon_slots is the simulated span after t_init, so
    any prefix up to that age is fully determined.
    """

    video: Video
    root: int
    parent: dict[int, int]
    share_time: dict[int, int]
    view_time: dict[int, int]
    spreaders: frozenset[int]
    receivers: frozenset[int]
    horizon_slots: int
    events: tuple[Event, ...]

    @property
    def participants(self) -> set[int]:
        return set(self.spreaders) | set(self.receivers)


def popularity(tree: PropagationTree) -> int:
    """Spreader count plus receiver count; the root always counts."""
    return len(tree.spreaders) + len(tree.receivers)


def init_share(g: SocialGraph, v: Video) -> PropagationState:
    """Start a cascade: root INFECTIOUS, its friends SUSCEPTIBLE, rest SAFE.

    Activation lags for the initial susceptible set are drawn by the
    first step() call, which owns the generator.
    """
    if v.initiator not in g.users:
        raise KeyError(f"unknown initiator {v.initiator}")
    state = {uid: State.SAFE for uid in g.users}
    since = {uid: v.t_init for uid in g.users}
    ps = PropagationState(video=v, state=state, since=since)
    state[v.initiator] = State.INFECTIOUS
    ps.spreaders.add(v.initiator)
    ps.share_time[v.initiator] = v.t_init
    ps.events.append(Event(v.t_init, v.id, v.initiator, EVENT_INIT, None))
    for friend in sorted(g.neighbors(v.initiator)):
        state[friend] = State.SUSCEPTIBLE
        ps.parent[friend] = v.initiator
        ps.unscheduled.append(friend)
        ps.events.append(Event(v.t_init, v.id, friend, EVENT_EXPOSE, v.initiator))
    return ps


def step(ps: PropagationState, g: SocialGraph, params: PropagationParams,
         slot: int, rng: np.random.Generator) -> list[Event]:
    """Advance one timeslot; returns the events it produced.

    Users whose activation lag elapses at this slot resolve their watch
    and share decisions; fresh sharers expose their SAFE friends with a
    newly sampled lag. The slot must be strictly after the previous one.
    """
    if ps.last_slot is not None and slot <= ps.last_slot:
        raise ValueError(f"clock regression: slot {slot} after {ps.last_slot}")
    if slot <= ps.video.t_init:
        raise ValueError(f"slot {slot} not after initiation {ps.video.t_init}")

    if ps.unscheduled:
        for u in sorted(ps.unscheduled):
            act = ps.video.t_init + sample_reshare_lag(params, rng)
            ps.activation[u] = act
            ps.pending.setdefault(act, []).append(u)
        ps.unscheduled.clear()

    new_events: list[Event] = []
    newly_infectious: list[int] = []
    vid = ps.video.id
    for u in sorted(ps.pending.pop(slot, ())):
        exposer = ps.parent[u]
        ps.since[u] = slot
        ps.activation.pop(u, None)
        if rng.random() < params.p_watch:
            ps.state[u] = State.INFECTED
            new_events.append(Event(slot, vid, u, EVENT_WATCH, exposer))
            if rng.random() < params.p_share:
                ps.state[u] = State.INFECTIOUS
                ps.spreaders.add(u)
                ps.share_time[u] = slot
                new_events.append(Event(slot, vid, u, EVENT_SHARE, exposer))
                newly_infectious.append(u)
            else:
                ps.state[u] = State.RECOVERED
                ps.receivers.add(u)
                ps.view_time[u] = slot
                new_events.append(Event(slot, vid, u, EVENT_RECOVER, exposer))
        else:
            ps.state[u] = State.IMMUNE
            new_events.append(Event(slot, vid, u, EVENT_IMMUNE, exposer))

    # Earliest sharer wins the exposure; only SAFE users can be exposed,
    # and same-slot sharers are processed in ascending user id.
    for u in newly_infectious:
        for w in sorted(g.neighbors(u)):
            if ps.state[w] is not State.SAFE:
                continue
            ps.state[w] = State.SUSCEPTIBLE
            ps.since[w] = slot
            ps.parent[w] = u
            act = slot + sample_reshare_lag(params, rng)
            ps.activation[w] = act
            ps.pending.setdefault(act, []).append(w)
            new_events.append(Event(slot, vid, w, EVENT_EXPOSE, u))

    ps.events.extend(new_events)
    ps.last_slot = slot
    return new_events


def freeze(ps: PropagationState, horizon: int) -> PropagationTree:
    """Snapshot a state into an immutable tree spanning `horizon` slots."""
    return PropagationTree(
        video=ps.video,
        root=ps.video.initiator,
        parent=dict(ps.parent),
        share_time=dict(ps.share_time),
        view_time=dict(ps.view_time),
        spreaders=frozenset(ps.spreaders),
        receivers=frozenset(ps.receivers),
        horizon_slots=horizon,
        events=tuple(ps.events),
    )


def run_cascade(g: SocialGraph, v: Video, params: PropagationParams,
                horizon: int, rng: np.random.Generator) -> PropagationTree:
    """Run one cascade to completion or to t_init + horizon."""
    if horizon < 1:
        raise ConfigError("horizon must be >= 1")
    ps = init_share(g, v)
    end = v.t_init + horizon
    if ps.unscheduled:
        step(ps, g, params, v.t_init + 1, rng)
    while ps.pending:
        nxt = min(ps.pending)
        if nxt > end:
            break
        step(ps, g, params, nxt, rng)
    return freeze(ps, horizon)


def tree_prefix(tree: PropagationTree, age: int) -> PropagationTree:
    """The tree as it looked `age` slots after initiation."""
    if age < 0 or age > tree.horizon_slots:
        raise ValueError(f"age {age} outside simulated horizon {tree.horizon_slots}")
    cutoff = tree.video.t_init + age
    share_time = {u: t for u, t in tree.share_time.items() if t <= cutoff}
    view_time = {u: t for u, t in tree.view_time.items() if t <= cutoff}
    keep = set(share_time) | set(view_time)
    return PropagationTree(
        video=tree.video,
        root=tree.root,
        parent={u: p for u, p in tree.parent.items() if u in keep},
        share_time=share_time,
        view_time=view_time,
        spreaders=frozenset(u for u in tree.spreaders if u in share_time),
        receivers=frozenset(u for u in tree.receivers if u in view_time),
        horizon_slots=age,
        events=tuple(e for e in tree.events if e.slot <= cutoff),
    )
