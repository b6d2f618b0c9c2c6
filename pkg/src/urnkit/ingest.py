"""Loading externally produced categorical event streams.

An event stream is an ordered list of (timestamp, label) records; the
labels play the role of colors. ``to_history`` relabels them by order of
first appearance, which produces exactly the history-sequence shape the
simulator emits, and ``empirical_trajectories`` turns a history into the
checkpointed trajectories the analysis layer consumes.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from typing import Sequence

from .analysis import TrajectoryBundle
from .errors import ValidationError
from .urn_core import checkpoint_times, validate_history

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EventStream:
    """Chronologically sorted (timestamp, label) records.

    ``reorder_count`` says how many adjacent out-of-order pairs the raw
    file contained before the stable sort (0 for an already-sorted file).
    """

    records: tuple[tuple[int, str], ...]
    reorder_count: int = 0

    def __len__(self) -> int:
        return len(self.records)


def _coerce_timestamp(value, where: str) -> int:
    if isinstance(value, bool):
        raise ValidationError(f"{where}: boolean is not a timestamp")
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    if isinstance(value, str):
        try:
            return int(value.strip())
        except ValueError:
            raise ValidationError(
                f"{where}: cannot parse timestamp {value!r}") from None
    raise ValidationError(f"{where}: cannot parse timestamp {value!r}")


def load_events(path, fmt: str = "csv", *, timestamp_field: str = "timestamp",
                label_field: str = "label", delimiter: str = ",") -> EventStream:
    """Parse a CSV (header row required) or JSONL file of events.

    Records are stably sorted by timestamp, so ties keep file order.
    Malformed rows fail loudly with their line number. An empty file is
    a valid, empty stream.
    """
    if fmt not in ("csv", "jsonl"):
        raise ValidationError(f"unknown format {fmt!r}; use csv or jsonl")
    raw: list[tuple[int, str]] = []
    if fmt == "csv":
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh, delimiter=delimiter)
            if reader.fieldnames is not None:
                missing = {timestamp_field, label_field} - set(reader.fieldnames)
                if missing:
                    raise ValidationError(
                        f"{path}: header lacks columns {sorted(missing)}")
            for lineno, row in enumerate(reader, start=2):
                ts = _coerce_timestamp(row.get(timestamp_field),
                                       f"{path}:{lineno}")
                label = row.get(label_field)
                if not label:
                    raise ValidationError(f"{path}:{lineno}: empty label")
                raw.append((ts, label))
    else:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ValidationError(
                        f"{path}:{lineno}: bad JSON ({exc.msg})") from None
                if timestamp_field not in obj or label_field not in obj:
                    raise ValidationError(
                        f"{path}:{lineno}: missing "
                        f"{timestamp_field!r} or {label_field!r}")
                ts = _coerce_timestamp(obj[timestamp_field], f"{path}:{lineno}")
                label = obj[label_field]
                if not isinstance(label, str) or not label:
                    raise ValidationError(
                        f"{path}:{lineno}: label must be a nonempty string")
                raw.append((ts, label))

    reorders = sum(1 for a, b in zip(raw, raw[1:]) if b[0] < a[0])
    if reorders:
        logger.warning("%s: %d out-of-order timestamp pairs; stable-sorted",
                       path, reorders)
    ordered = sorted(raw, key=lambda rec: rec[0])
    return EventStream(records=tuple(ordered), reorder_count=reorders)


@dataclass(frozen=True)
class HistoryMapping:
    """A history sequence plus the bijection between labels and colors."""

    history: tuple[int, ...]
    label_to_color: dict[str, int]

    @property
    def color_to_label(self) -> dict[int, str]:
        return {c: lab for lab, c in self.label_to_color.items()}


def to_history(stream: EventStream) -> HistoryMapping:
    """Relabel events by order of first appearance.

    The first occurrence of each label takes the next free color id, so
    the output always passes the simulator's history validation.
    """
    if len(stream) == 0:
        raise ValidationError("cannot build a history from an empty stream")
    mapping: dict[str, int] = {}
    history: list[int] = []
    for _, label in stream.records:
        c = mapping.get(label)
        if c is None:
            c = len(mapping) + 1
            mapping[label] = c
        history.append(c)
    return HistoryMapping(history=tuple(history), label_to_color=mapping)


def empirical_trajectories(history: Sequence[int], *,
                           checkpoints_per_decade: int = 64,
                           top_m: int = 20) -> TrajectoryBundle:
    """Checkpointed trajectories of a history sequence.

    Tracks the ``top_m`` most frequent colors (ties broken by earlier
    birth). Per-color trajectories begin at the first checkpoint at or
    after the color's birth, matching the simulator's convention, so a
    simulated history round-trips to identical trajectories.
    """
    history = [int(s) for s in history]
    validate_history(history)
    n = len(history)

    final: dict[int, int] = {}
    for s in history:
        final[s] = final.get(s, 0) + 1
    final_counts = tuple(final[c] for c in range(1, len(final) + 1))
    top = sorted(range(1, len(final) + 1),
                 key=lambda c: (-final[c], c))[:top_m]

    times = checkpoint_times(n, checkpoints_per_decade)
    colors_traj: list[tuple[int, int]] = []
    per_color: dict[int, list[tuple[int, int]]] = {c: [] for c in top}

    counts: dict[int, int] = {}
    next_idx = 0
    next_time = times[0]
    for t, s in enumerate(history, start=1):
        counts[s] = counts.get(s, 0) + 1
        if t == next_time:
            colors_traj.append((t, len(counts)))
            for c in top:
                k = counts.get(c, 0)
                if k >= 1:
                    per_color[c].append((t, k))
            next_idx += 1
            next_time = times[next_idx] if next_idx < len(times) else 0

    return TrajectoryBundle(
        horizon=n,
        colors=tuple(colors_traj),
        per_color={c: tuple(traj) for c, traj in per_color.items()},
        final_counts=final_counts,
    )
