"""Three-region doorway counting.

The frame is split by two horizontal lines into an outside region (A), a
critical buffer (B), and an inside region (C). Every track keeps a short,
deduplicated history of regions it has visited; a traversal that anchors in A
and later reaches C counts as an entry, the reverse as an exit. The buffer
absorbs people loitering near a single boundary, which is what makes the
scheme immune to the oscillating double counts that plague one-line systems.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Optional

if TYPE_CHECKING:
    from .tracker import TrackedObject


class Region(Enum):
    A = "A"  # fully outside
    B = "B"  # critical buffer between the lines
    C = "C"  # fully inside


class Orientation(Enum):
    OUTSIDE_TOP = "outside_top"
    OUTSIDE_BOTTOM = "outside_bottom"


@dataclass(frozen=True)
class RegionLayout:
    """Two horizontal lines (normalized y) partitioning the frame.

    `line_ab` and `line_bc` always satisfy 0 < line_ab < line_bc < 1; the
    orientation decides which side is outside. For OUTSIDE_TOP, A lies above
    both lines and C below; OUTSIDE_BOTTOM mirrors that vertically.
    """

    line_ab: float = 0.4
    line_bc: float = 0.6
    orientation: Orientation = Orientation.OUTSIDE_TOP

    def __post_init__(self):
        if not 0.0 < self.line_ab < self.line_bc < 1.0:
            raise ValueError(
                f"region lines must satisfy 0 < line_ab < line_bc < 1, "
                f"got ({self.line_ab}, {self.line_bc})"
            )


DEFAULT_LAYOUT = RegionLayout()


def classify_region(center_y: float, layout: RegionLayout = DEFAULT_LAYOUT) -> Region:
    """Map a normalized vertical position to its region.

    A point exactly on a line belongs to B: the buffer owns ties, so a
    boundary position can never produce a count on its own.
    """
    if layout.orientation is Orientation.OUTSIDE_TOP:
        if center_y < layout.line_ab:
            return Region.A
        if center_y > layout.line_bc:
            return Region.C
        return Region.B
    if center_y > layout.line_bc:
        return Region.A
    if center_y < layout.line_ab:
        return Region.C
    return Region.B


class EventKind(Enum):
    ENTRY = "entry"
    EXIT = "exit"


@dataclass(frozen=True)
class CrossingEvent:
    kind: EventKind
    track_id: int
    frame_id: int
    timestamp_ms: int


# Histories are capped; since unresolved histories alternate between two
# regions at most, the most recent anchor always survives the trim.
HISTORY_LIMIT = 3


def update_history(
    track: "TrackedObject",
    region: Region,
    frame_id: int = 0,
    timestamp_ms: int = 0,
) -> Optional[CrossingEvent]:
    """Record the track's current region; emit an event when a traversal completes.

    The region is appended only when it differs from the latest entry. An
    appended C with an earlier A in the history (B in between or not) emits an
    entry; an appended A with an earlier C emits an exit. After an event the
    history resets to the terminal region, so loitering inside and leaving
    later still yields exactly one exit. Tracks born in B or C never produce
    an entry without first touching A, and symmetrically for exits.
    """
    history = track.region_history
    if history and history[-1] is region:
        return None
    history.append(region)
    if region is Region.C and Region.A in history[:-1]:
        del history[:]
        history.append(Region.C)
        return CrossingEvent(EventKind.ENTRY, track.id, frame_id, timestamp_ms)
    if region is Region.A and Region.C in history[:-1]:
        del history[:]
        history.append(Region.A)
        return CrossingEvent(EventKind.EXIT, track.id, frame_id, timestamp_ms)
    while len(history) > HISTORY_LIMIT:
        history.pop(0)
    return None


@dataclass
class CountLedger:
    """Running entry/exit tallies with the full event log."""

    ins: int = 0
    outs: int = 0
    events: list[CrossingEvent] = field(default_factory=list)

    def occupancy(self) -> int:
        """Entries minus exits; negative when monitoring began with people inside."""
        return self.ins - self.outs

    def snapshot(self) -> dict:
        return {"ins": self.ins, "outs": self.outs, "occupancy": self.occupancy()}


def tally(ledger: CountLedger, event: CrossingEvent) -> CountLedger:
    """Fold one crossing event into the ledger; returns the ledger."""
    if event.kind is EventKind.ENTRY:
        ledger.ins += 1
    else:
        ledger.outs += 1
    ledger.events.append(event)
    return ledger


def event_to_json(event: CrossingEvent) -> str:
    return json.dumps(
        {
            "kind": event.kind.value,
            "track_id": event.track_id,
            "frame_id": event.frame_id,
            "ts_ms": event.timestamp_ms,
        },
        separators=(",", ":"),
    )


def write_events(events: Iterable[CrossingEvent], fp) -> int:
    """Write the event log as line-delimited JSON; returns line count."""
    count = 0
    for event in events:
        fp.write(event_to_json(event) + "\n")
        count += 1
    return count


@dataclass(frozen=True)
class AccuracyReport:
    total_observations: int
    error: int
    accuracy_percent: float


def accuracy(total_observations: int, error: int) -> AccuracyReport:
    """Counting accuracy: (total - error) / total, as a percentage.

    Reported to two decimals. Pooling several monitoring periods means
    summing both totals and errors before calling this.
    """
    if total_observations <= 0:
        raise ValueError("total_observations must be positive")
    if error < 0:
        raise ValueError("error must be non-negative")
    pct = round((total_observations - error) / total_observations * 100.0, 2)
    return AccuracyReport(total_observations, error, pct)
