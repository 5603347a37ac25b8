"""Log containers and their CSV wire formats.

Every log carries the scenario id it came from so downstream analysis
can refuse to mix runs. Writers are deterministic: fixed headers, fixed
row order, repr-stable floats.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

from .errors import ParseError
from .popularity import PredictionRow
from .propagation import Event
from .d2d import Delivery


class DeliveryRow(NamedTuple):
    slot: int
    video: int
    user: int
    region: int
    source: str
    cost: float


@dataclass
class EventLog:
    scenario: str
    rows: list[Event] = field(default_factory=list)

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("slot", "video_id", "user_id", "event", "parent_id"))
            for e in self.rows:
                w.writerow((e.slot, e.video, e.user, e.kind,
                            "" if e.parent is None else e.parent))

    @classmethod
    def from_csv(cls, path, scenario: str = "") -> "EventLog":
        path = Path(path)
        rows: list[Event] = []
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["slot", "video_id", "user_id", "event", "parent_id"]:
                raise ParseError(path, 1, "bad event log header")
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    parent = None if row[4] == "" else int(row[4])
                    rows.append(Event(int(row[0]), int(row[1]), int(row[2]), row[3], parent))
                except (ValueError, IndexError) as exc:
                    raise ParseError(path, lineno, str(exc)) from exc
        return cls(scenario, rows)


@dataclass
class DeliveryLog:
    scenario: str
    rows: list[DeliveryRow] = field(default_factory=list)

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("slot", "video_id", "user_id", "region_id", "source", "cost"))
            for r in self.rows:
                w.writerow((r.slot, r.video, r.user, r.region, r.source, repr(r.cost)))

    @classmethod
    def from_csv(cls, path, scenario: str = "") -> "DeliveryLog":
        path = Path(path)
        rows: list[DeliveryRow] = []
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["slot", "video_id", "user_id", "region_id", "source", "cost"]:
                raise ParseError(path, 1, "bad delivery log header")
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    rows.append(DeliveryRow(int(row[0]), int(row[1]), int(row[2]),
                                            int(row[3]), row[4], float(row[5])))
                except (ValueError, IndexError) as exc:
                    raise ParseError(path, lineno, str(exc)) from exc
        return cls(scenario, rows)


@dataclass
class D2DLog:
    scenario: str
    deliveries: list[Delivery] = field(default_factory=list)

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("slot", "video_id", "carrier_id", "recipient_id", "region_id"))
            for d in self.deliveries:
                w.writerow(d)

    @classmethod
    def from_csv(cls, path, scenario: str = "") -> "D2DLog":
        path = Path(path)
        deliveries: list[Delivery] = []
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["slot", "video_id", "carrier_id", "recipient_id", "region_id"]:
                raise ParseError(path, 1, "bad d2d log header")
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    deliveries.append(Delivery(*(int(c) for c in row)))
                except ValueError as exc:
                    raise ParseError(path, lineno, str(exc)) from exc
        return cls(scenario, deliveries)


@dataclass
class PredictionReport:
    scenario: str
    strategy: str
    rows: list[PredictionRow] = field(default_factory=list)

    @property
    def mean_reward(self) -> float:
        return sum(r.reward for r in self.rows) / len(self.rows) if self.rows else 0.0

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("video_id", "commit_age", "predicted_level", "true_level", "reward"))
            for r in self.rows:
                w.writerow((r.video, r.commit_age, r.predicted_level, r.true_level,
                            repr(r.reward)))
            w.writerow((f"summary:{self.strategy}", "", "", "", repr(self.mean_reward)))

    @classmethod
    def from_csv(cls, path, scenario: str = "") -> "PredictionReport":
        path = Path(path)
        rows: list[PredictionRow] = []
        strategy = ""
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["video_id", "commit_age", "predicted_level", "true_level", "reward"]:
                raise ParseError(path, 1, "bad prediction report header")
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if row[0].startswith("summary:"):
                    strategy = row[0].split(":", 1)[1]
                    continue
                try:
                    rows.append(PredictionRow(int(row[0]), int(row[1]), int(row[2]),
                                              int(row[3]), float(row[4])))
                except (ValueError, IndexError) as exc:
                    raise ParseError(path, lineno, str(exc)) from exc
        return cls(scenario, strategy, rows)


def write_csv(path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    """Small deterministic CSV writer for plot-ready outputs."""
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow(row)
