"""Region-annotated social graph.

Provides synthetic generation with geographic homophily, trace-file
ingestion, and the structural measures (local clustering, inter-region
distances) the propagation analyses depend on. Graphs are immutable
after construction and safe for concurrent reads.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, IntegrityError, ParseError


@dataclass(frozen=True)
class Region:
    """An edge-network region: planar center in km plus server capacities."""

    id: int
    x_km: float
    y_km: float
    storage_slots: int = 20
    bandwidth_units: int = 8

    def __post_init__(self):
        if not (math.isfinite(self.x_km) and math.isfinite(self.y_km)):
            raise ConfigError(f"region {self.id}: center must be finite")


@dataclass(frozen=True)
class User:
    id: int
    home_region: int
    login_prob: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.login_prob <= 1.0:
            raise ConfigError(f"user {self.id}: login_prob {self.login_prob} not in [0,1]")


def region_distance(a: Region, b: Region) -> float:
    """Euclidean distance between region centers, in km."""
    return math.hypot(a.x_km - b.x_km, a.y_km - b.y_km)


class SocialGraph:
    """Undirected friendship graph over users with home regions.

    Self-loops are rejected; duplicate edges (in either orientation)
    collapse to one undirected edge. Endpoints and home regions must be
    known, otherwise construction raises IntegrityError.
    """

    def __init__(self, users: Iterable[User], regions: Iterable[Region],
                 edges: Iterable[tuple[int, int]]):
        self.users: dict[int, User] = {}
        for u in users:
            if u.id in self.users:
                raise IntegrityError(f"duplicate user id {u.id}")
            self.users[u.id] = u
        self.regions: dict[int, Region] = {}
        for r in regions:
            if r.id in self.regions:
                raise IntegrityError(f"duplicate region id {r.id}")
            self.regions[r.id] = r
        for u in self.users.values():
            if u.home_region not in self.regions:
                raise IntegrityError(f"user {u.id}: unknown home region {u.home_region}")

        self._adj: dict[int, set[int]] = {uid: set() for uid in self.users}
        seen: set[tuple[int, int]] = set()
        for a, b in edges:
            if a == b:
                raise IntegrityError(f"self-loop on user {a}")
            if a not in self.users or b not in self.users:
                raise IntegrityError(f"edge ({a},{b}) references unknown user")
            key = (a, b) if a < b else (b, a)
            if key in seen:
                continue
            seen.add(key)
            self._adj[a].add(b)
            self._adj[b].add(a)
        self._edges: list[tuple[int, int]] = sorted(seen)

    @property
    def n_users(self) -> int:
        return len(self.users)

    @property
    def n_edges(self) -> int:
        return len(self._edges)

    def edges(self) -> list[tuple[int, int]]:
        """All undirected edges as sorted (low, high) pairs."""
        return list(self._edges)

    def neighbors(self, user_id: int) -> set[int]:
        return set(self._adj[user_id])

    def degree(self, user_id: int) -> int:
        return len(self._adj[user_id])

    def has_edge(self, a: int, b: int) -> bool:
        return b in self._adj.get(a, ())

    def home_of(self, user_id: int) -> Region:
        return self.regions[self.users[user_id].home_region]

    def user_distance(self, a: int, b: int) -> float:
        """Distance between two users' home regions (0 within one region)."""
        return region_distance(self.home_of(a), self.home_of(b))

    def connected_component(self, start: int) -> set[int]:
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for w in self._adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen


def clustering_coefficient(g: SocialGraph, subset: Iterable[int]) -> float:
    """Mean local clustering coefficient over the subgraph induced by subset.

    Members whose induced degree is below 2 contribute 0. Raises
    ValueError on an empty subset and KeyError on unknown user ids.
    """
    ids = set(subset)
    if not ids:
        raise ValueError("clustering_coefficient: empty subset")
    for u in ids:
        if u not in g.users:
            raise KeyError(f"unknown user id {u}")
    total = 0.0
    for u in ids:
        nbrs = g.neighbors(u) & ids
        k = len(nbrs)
        if k < 2:
            continue
        ordered = sorted(nbrs)
        links = 0
        for i, v in enumerate(ordered):
            ab = g.neighbors(v)
            links += sum(1 for w in ordered[i + 1:] if w in ab)
        total += 2.0 * links / (k * (k - 1))
    return total / len(ids)


@dataclass(frozen=True)
class GraphGenParams:
    """Knobs for the synthetic generator.

    edges_per_node is the attachment count m of the preferential process;
    triad_prob is the chance an attachment closes a triangle instead of
    following degree, which controls local clustering; attach_attempts
    bounds rejection-sampling work per edge under the homophily filter.
    """

    edges_per_node: int = 3
    triad_prob: float = 0.6
    area_side_km: float = 100.0
    login_prob: tuple[float, float] = (0.4, 0.9)
    storage_slots: int = 20
    bandwidth_units: int = 8
    attach_attempts: int = 60

    def __post_init__(self):
        if self.edges_per_node < 1:
            raise ConfigError("edges_per_node must be >= 1")
        if not 0.0 <= self.triad_prob <= 1.0:
            raise ConfigError("triad_prob must be in [0,1]")
        if self.area_side_km <= 0:
            raise ConfigError("area_side_km must be positive")
        lo, hi = self.login_prob
        if not (0.0 <= lo <= hi <= 1.0):
            raise ConfigError("login_prob range must satisfy 0 <= lo <= hi <= 1")
        if self.attach_attempts < 1:
            raise ConfigError("attach_attempts must be >= 1")


def generate_graph(n_users: int, n_regions: int, params: GraphGenParams,
                   homophily_scale: float, seed: int) -> SocialGraph:
    """Synthesize a scale-free graph with geographic homophily.

    Preferential attachment (with a triad-closure step) proposes targets;
    each proposal is accepted with probability exp(-d/homophily_scale)
    where d is the distance between the two users' home regions. Every
    non-core node attaches to at least one earlier node, so the graph is
    connected. Deterministic for a fixed seed.
    """
    if n_users < 1 or n_regions < 1:
        raise ConfigError("n_users and n_regions must be >= 1")
    if homophily_scale <= 0:
        raise ConfigError("homophily_scale must be positive")

    rng = np.random.default_rng(seed)
    centers = rng.uniform(0.0, params.area_side_km, size=(n_regions, 2))
    regions = [Region(i, float(x), float(y), params.storage_slots, params.bandwidth_units)
               for i, (x, y) in enumerate(centers)]
    homes = rng.integers(0, n_regions, size=n_users)
    lo, hi = params.login_prob
    logins = rng.uniform(lo, hi, size=n_users)
    users = [User(i, int(homes[i]), float(logins[i])) for i in range(n_users)]

    def pair_distance(a: int, b: int) -> float:
        ca, cb = centers[homes[a]], centers[homes[b]]
        return math.hypot(ca[0] - cb[0], ca[1] - cb[1])

    m = params.edges_per_node
    adj: dict[int, set[int]] = {i: set() for i in range(n_users)}
    endpoints: list[int] = []  # each node repeated once per incident edge
    edges: list[tuple[int, int]] = []

    def add_edge(a: int, b: int) -> None:
        adj[a].add(b)
        adj[b].add(a)
        edges.append((a, b) if a < b else (b, a))
        endpoints.append(a)
        endpoints.append(b)

    core = min(m + 1, n_users)
    for i in range(core):
        for j in range(i + 1, core):
            add_edge(i, j)

    for u in range(core, n_users):
        targets: set[int] = set()
        budget = params.attach_attempts * m
        while len(targets) < m and budget > 0:
            budget -= 1
            if targets and rng.random() < params.triad_prob:
                base = sorted(targets)[rng.integers(len(targets))]
                pool = sorted(adj[base] - targets - {u})
                if not pool:
                    continue
                cand = pool[rng.integers(len(pool))]
            else:
                cand = endpoints[rng.integers(len(endpoints))]
            if cand == u or cand in targets:
                continue
            if rng.random() < math.exp(-pair_distance(u, cand) / homophily_scale):
                targets.add(cand)
        if not targets:
            # Homophily filter starved the node: fall back to the nearest
            # earlier node so the graph stays connected.
            cand = min(range(u), key=lambda w: (pair_distance(u, w), w))
            targets.add(cand)
        for t in sorted(targets):
            add_edge(u, t)

    return SocialGraph(users, regions, edges)


def _read_csv(path, expected_header: Sequence[str]):
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(path, 1, "empty file")
        if [h.strip() for h in header] != list(expected_header):
            raise ParseError(path, 1, f"expected header {','.join(expected_header)}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(expected_header):
                raise ParseError(path, lineno, f"expected {len(expected_header)} fields, got {len(row)}")
            yield lineno, row


def load_graph(edge_file, user_file, region_file) -> SocialGraph:
    """Load a graph from the three trace files.

    Edge file: one "u v" pair per line, '#' starts a comment. User file:
    CSV "user_id,region_id,login_prob". Region file: CSV
    "region_id,x_km,y_km,storage_slots,bandwidth_units".
    """
    regions = []
    for lineno, row in _read_csv(region_file, ("region_id", "x_km", "y_km", "storage_slots", "bandwidth_units")):
        try:
            regions.append(Region(int(row[0]), float(row[1]), float(row[2]), int(row[3]), int(row[4])))
        except (ValueError, ConfigError) as exc:
            raise ParseError(region_file, lineno, str(exc)) from exc

    users = []
    for lineno, row in _read_csv(user_file, ("user_id", "region_id", "login_prob")):
        try:
            users.append(User(int(row[0]), int(row[1]), float(row[2])))
        except (ValueError, ConfigError) as exc:
            raise ParseError(user_file, lineno, str(exc)) from exc

    edges = []
    edge_path = Path(edge_file)
    with edge_path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.split()
            if len(parts) != 2:
                raise ParseError(edge_path, lineno, f"expected 'u v', got {line.strip()!r}")
            try:
                a, b = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise ParseError(edge_path, lineno, str(exc)) from exc
            edges.append((a, b))

    return SocialGraph(users, regions, edges)


def save_graph(g: SocialGraph, edge_file, user_file, region_file) -> None:
    """Write a graph back out in the load_graph file formats."""
    with Path(region_file).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("region_id", "x_km", "y_km", "storage_slots", "bandwidth_units"))
        for r in sorted(g.regions.values(), key=lambda r: r.id):
            w.writerow((r.id, repr(r.x_km), repr(r.y_km), r.storage_slots, r.bandwidth_units))
    with Path(user_file).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("user_id", "region_id", "login_prob"))
        for u in sorted(g.users.values(), key=lambda u: u.id):
            w.writerow((u.id, u.home_region, repr(u.login_prob)))
    with Path(edge_file).open("w") as fh:
        for a, b in g.edges():
            fh.write(f"{a} {b}\n")
