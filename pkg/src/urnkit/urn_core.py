"""Triggered urn dynamics.

A triggered urn starts empty. At each time step an independent Bernoulli
trigger with probability p_n (p_0 = 1, so the first step always fires)
either introduces a brand-new color, which enters with one ball and
sampling weight F(1), or draws one of the existing colors c with
probability proportional to its current weight F(K_c), where K_c counts
how many times c has been observed. Colors are labeled 1, 2, 3, ... in
order of first appearance; the label observed at each step forms the
history sequence.

The module provides the weight maps F, the trigger schedules p_n, the
single-step transition, a seeded batch simulator with geometric
checkpointing, exact probabilities of given histories, and a brute-force
enumerator over every history of a short horizon. The enumerator is the
reference oracle that the closed-form modules are tested against.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from ._fenwick import CumulativeWeights
from ._rng import UniformSource, replication_generator
from .distributions import ExactDistribution
from .errors import ValidationError

DEFAULT_CLAMP = 1.0 - 1e-6

# ---------------------------------------------------------------------------
# Weight maps F


@dataclass(frozen=True)
class Linear:
    """Weight map F(k) = rho*k + rho_tilde (affine, strictly increasing)."""

    rho: float
    rho_tilde: float = 0.0

    def __post_init__(self) -> None:
        if not self.rho > 0.0:
            raise ValidationError("rho must be positive")
        if not self.rho + self.rho_tilde > 0.0:
            raise ValidationError("rho + rho_tilde must be positive (F(1) > 0)")

    def __call__(self, k: int) -> float:
        return self.rho * k + self.rho_tilde

    @property
    def eta(self) -> float:
        """The shape ratio rho_tilde / rho."""
        return self.rho_tilde / self.rho

    def config(self) -> dict:
        return {"kind": "linear", "rho": self.rho, "rho_tilde": self.rho_tilde}


@dataclass(frozen=True)
class PowerRoot:
    """Weight map F(k) = k**(1/rho) with rho > 1 (sublinear growth)."""

    rho: float

    def __post_init__(self) -> None:
        if not self.rho > 1.0:
            raise ValidationError("rho must exceed 1")

    def __call__(self, k: int) -> float:
        return k ** (1.0 / self.rho)

    def config(self) -> dict:
        return {"kind": "power_root", "rho": self.rho}


@dataclass(frozen=True)
class Tabulated:
    """Weights read from a table: F(k) = values[k-1] for k within it.

    Beyond the table the last finite difference is continued linearly,
    which keeps F strictly increasing. A single-entry table continues
    with step values[0].
    """

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        values = tuple(float(v) for v in self.values)
        if len(values) == 0:
            raise ValidationError("table must be nonempty")
        if not values[0] > 0.0:
            raise ValidationError("F(1) must be positive")
        for a, b in zip(values, values[1:]):
            if not b > a:
                raise ValidationError("table must be strictly increasing")
        object.__setattr__(self, "values", values)

    @property
    def _step(self) -> float:
        if len(self.values) >= 2:
            return self.values[-1] - self.values[-2]
        return self.values[0]

    def __call__(self, k: int) -> float:
        values = self.values
        if k <= len(values):
            return values[k - 1]
        return values[-1] + (k - len(values)) * self._step

    def config(self) -> dict:
        return {"kind": "tabulated", "values": list(self.values)}


UpdateFunction = Union[Linear, PowerRoot, Tabulated]


def update_from_config(data: dict) -> UpdateFunction:
    kind = data.get("kind")
    if kind == "linear":
        return Linear(data["rho"], data.get("rho_tilde", 0.0))
    if kind == "power_root":
        return PowerRoot(data["rho"])
    if kind == "tabulated":
        return Tabulated(tuple(data["values"]))
    raise ValidationError(f"unknown update function kind: {kind!r}")


# ---------------------------------------------------------------------------
# Trigger schedules p_n


class _ScheduleBase:
    """Shared evaluation plumbing for the schedule variants.

    Subclasses implement ``_value(n)`` and ``_values(ns)`` for n >= 1;
    p_0 = 1 is enforced here, unconditionally.
    """

    def probability(self, n: int) -> float:
        if n < 0:
            raise ValidationError("time index must be nonnegative")
        if n == 0:
            return 1.0
        return self._value(n)

    def prob_slice(self, start: int, stop: int) -> np.ndarray:
        """Vector of p_n for n in [start, stop)."""
        if start < 0 or stop < start:
            raise ValidationError("bad slice bounds")
        if stop == start:
            return np.empty(0)
        ns = np.arange(max(start, 1), stop, dtype=np.float64)
        vals = self._values(ns)
        if start == 0:
            vals = np.concatenate(([1.0], vals))
        return vals

    def _value(self, n: int) -> float:
        raise NotImplementedError

    def _values(self, ns: np.ndarray) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(_ScheduleBase):
    """p_n = p for every n >= 1."""

    p: float

    def __post_init__(self) -> None:
        if not 0.0 < self.p < 1.0:
            raise ValidationError("p must lie strictly inside (0, 1)")

    def _value(self, n: int) -> float:
        return self.p

    def _values(self, ns: np.ndarray) -> np.ndarray:
        return np.full(len(ns), self.p)

    def config(self) -> dict:
        return {"kind": "constant", "p": self.p}


@dataclass(frozen=True)
class PowerLaw(_ScheduleBase):
    """p_n = min(clamp, scale * n**(theta-1)); colors grow like n**theta."""

    theta: float
    scale: float = 1.0
    clamp: float = DEFAULT_CLAMP

    def __post_init__(self) -> None:
        if not 0.0 < self.theta < 1.0:
            raise ValidationError("theta must lie strictly inside (0, 1)")
        if not self.scale > 0.0:
            raise ValidationError("scale must be positive")
        if not 0.0 < self.clamp < 1.0:
            raise ValidationError("clamp must lie strictly inside (0, 1)")

    def _value(self, n: int) -> float:
        # evaluated through the vector path so that probability(n) is
        # bit-identical to the matching prob_slice entry (the array
        # power kernel rounds differently from scalar pow)
        return float(self._values(np.array([n], dtype=np.float64))[0])

    def _values(self, ns: np.ndarray) -> np.ndarray:
        return np.minimum(self.clamp, self.scale * ns ** (self.theta - 1.0))

    def config(self) -> dict:
        return {"kind": "power_law", "theta": self.theta, "scale": self.scale,
                "clamp": self.clamp}


@dataclass(frozen=True)
class Harmonic(_ScheduleBase):
    """p_n = min(clamp, scale / n); colors grow logarithmically."""

    scale: float = 1.0
    clamp: float = DEFAULT_CLAMP

    def __post_init__(self) -> None:
        if not self.scale > 0.0:
            raise ValidationError("scale must be positive")
        if not 0.0 < self.clamp < 1.0:
            raise ValidationError("clamp must lie strictly inside (0, 1)")

    def _value(self, n: int) -> float:
        return min(self.clamp, self.scale / n)

    def _values(self, ns: np.ndarray) -> np.ndarray:
        return np.minimum(self.clamp, self.scale / ns)

    def config(self) -> dict:
        return {"kind": "harmonic", "scale": self.scale, "clamp": self.clamp}


@dataclass(frozen=True)
class Geometric(_ScheduleBase):
    """p_n = min(clamp, scale * ratio**n); summable, so the number of
    colors stays finite almost surely. Values underflow to exactly 0 for
    very large n, which is harmless everywhere this is consumed."""

    ratio: float
    scale: float = 1.0
    clamp: float = DEFAULT_CLAMP

    def __post_init__(self) -> None:
        if not 0.0 < self.ratio < 1.0:
            raise ValidationError("ratio must lie strictly inside (0, 1)")
        if not self.scale > 0.0:
            raise ValidationError("scale must be positive")
        if not 0.0 < self.clamp < 1.0:
            raise ValidationError("clamp must lie strictly inside (0, 1)")

    def _value(self, n: int) -> float:
        # through the vector path, for bit-equality with prob_slice
        return float(self._values(np.array([n], dtype=np.float64))[0])

    def _values(self, ns: np.ndarray) -> np.ndarray:
        return np.minimum(self.clamp, self.scale * self.ratio ** ns)

    def config(self) -> dict:
        return {"kind": "geometric", "ratio": self.ratio, "scale": self.scale,
                "clamp": self.clamp}


@dataclass(frozen=True)
class Explicit(_ScheduleBase):
    """p_n read from a stored tuple: probs[n-1] for 1 <= n <= len(probs).

    Entries may be 0 or 1 (deterministic steps are fine for a finite
    descriptive schedule); anything outside [0, 1] is a construction
    error, and asking beyond the stored horizon is a usage error (the
    schedule does not extrapolate).
    """

    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        probs = tuple(float(p) for p in self.probs)
        if len(probs) == 0:
            raise ValidationError("explicit schedule needs at least one value")
        for i, p in enumerate(probs):
            if not 0.0 <= p <= 1.0:
                raise ValidationError(
                    f"explicit p_{i + 1} = {p!r} outside [0, 1]")
        object.__setattr__(self, "probs", probs)

    def _value(self, n: int) -> float:
        if n > len(self.probs):
            raise ValidationError(
                f"explicit schedule defines p_1..p_{len(self.probs)}, "
                f"got request for p_{n}")
        return self.probs[n - 1]

    def _values(self, ns: np.ndarray) -> np.ndarray:
        if len(ns) and ns[-1] > len(self.probs):
            raise ValidationError(
                f"explicit schedule defines p_1..p_{len(self.probs)}, "
                f"got request for p_{int(ns[-1])}")
        return np.asarray(self.probs, dtype=np.float64)[ns.astype(int) - 1]

    def config(self) -> dict:
        return {"kind": "explicit", "probs": list(self.probs)}


TriggerSchedule = Union[Constant, PowerLaw, Harmonic, Geometric, Explicit]


def schedule_from_config(data: dict) -> TriggerSchedule:
    kind = data.get("kind")
    if kind == "constant":
        return Constant(data["p"])
    if kind == "power_law":
        return PowerLaw(data["theta"], data.get("scale", 1.0),
                        data.get("clamp", DEFAULT_CLAMP))
    if kind == "harmonic":
        return Harmonic(data.get("scale", 1.0), data.get("clamp", DEFAULT_CLAMP))
    if kind == "geometric":
        return Geometric(data["ratio"], data.get("scale", 1.0),
                         data.get("clamp", DEFAULT_CLAMP))
    if kind == "explicit":
        return Explicit(tuple(data["probs"]))
    raise ValidationError(f"unknown schedule kind: {kind!r}")


# ---------------------------------------------------------------------------
# Live state and the single-step transition

REBUILD_EVERY = 1 << 16
DRIFT_TOLERANCE = 1e-9


class UrnState:
    """Mutable state of one urn run.

    Holds per-color observation counts, the running total weight and the
    cumulative-weight index used for O(log C) draws. The incrementally
    maintained total is rebuilt from the counts every REBUILD_EVERY
    steps; a relative mismatch above DRIFT_TOLERANCE aborts the run,
    since it would mean sampling probabilities had silently gone bad.
    """

    __slots__ = ("update", "counts", "n", "total_weight", "max_colors",
                 "_index", "_steps_since_rebuild")

    def __init__(self, update: UpdateFunction, *, capacity_hint: int = 1024,
                 max_colors: int | None = None) -> None:
        self.update = update
        self.counts: list[int] = []
        self.n = 0
        self.total_weight = 0.0
        self.max_colors = max_colors
        self._index = CumulativeWeights(capacity_hint)
        self._steps_since_rebuild = 0

    @property
    def num_colors(self) -> int:
        return len(self.counts)

    def add_new_color(self) -> int:
        """Register a brand-new color; returns its label."""
        if self.max_colors is not None and len(self.counts) >= self.max_colors:
            raise ValidationError(
                f"color capacity {self.max_colors} exceeded at time {self.n}")
        w = self.update(1)
        self.counts.append(1)
        self._index.append(w)
        self.total_weight += w
        self._advance()
        return len(self.counts)

    def repeat_color(self, c: int) -> None:
        """Record one more observation of existing color ``c``."""
        k = self.counts[c - 1]
        w_new = self.update(k + 1)
        w_old = self._index.weight(c)
        self.counts[c - 1] = k + 1
        self._index.update(c, w_new)
        self.total_weight += w_new - w_old
        self._advance()

    def select_color(self, u: float) -> int:
        """Map a uniform in [0, 1) to a color, proportionally to weight."""
        return self._index.find(u * self.total_weight)

    def _advance(self) -> None:
        self.n += 1
        self._steps_since_rebuild += 1
        if self._steps_since_rebuild >= REBUILD_EVERY:
            self.rebuild()

    def rebuild(self) -> None:
        """Recompute all weights from counts; detect accumulated drift."""
        update = self.update
        weights = [update(k) for k in self.counts]
        exact = math.fsum(weights)
        if abs(exact - self.total_weight) > DRIFT_TOLERANCE * max(exact, 1.0):
            raise RuntimeError(
                f"total weight drifted beyond tolerance at n={self.n}: "
                f"incremental {self.total_weight!r} vs exact {exact!r}")
        self._index.rebuild(weights)
        self.total_weight = exact
        self._steps_since_rebuild = 0


@dataclass(frozen=True)
class NewColor:
    color: int


@dataclass(frozen=True)
class Repeat:
    color: int


Outcome = Union[NewColor, Repeat]


def step(state: UrnState, schedule: TriggerSchedule, source: UniformSource) -> Outcome:
    """Advance the urn by one time step, drawing from ``source``.

    At the state's current time n the trigger fires with probability
    p_n; a fired trigger creates a new color, otherwise an existing
    color is drawn proportionally to its weight.
    """
    p = schedule.probability(state.n)
    if source.next() < p:
        return NewColor(state.add_new_color())
    c = state.select_color(source.next())
    state.repeat_color(c)
    return Repeat(c)


# ---------------------------------------------------------------------------
# Batch simulation


def checkpoint_times(horizon: int, per_decade: int = 64) -> list[int]:
    """Geometrically spaced integer times; always contains 1 and horizon."""
    if horizon < 1:
        raise ValidationError("horizon must be at least 1")
    if per_decade < 1:
        raise ValidationError("per_decade must be at least 1")
    times = {1, horizon}
    k = 0
    while True:
        t = int(round(10.0 ** (k / per_decade)))
        if t > horizon:
            break
        times.add(t)
        k += 1
    return sorted(times)


@dataclass(frozen=True)
class SimulationConfig:
    """Everything one replication needs; immutable and shareable.

    ``tracked_colors`` None means the default rule: colors 1 and 2 plus
    the first color born after time ceil(horizon/10). ``capture_history``
    None means histories are kept only for horizons up to 10_000.
    """

    schedule: TriggerSchedule
    update: UpdateFunction
    horizon: int
    seed: int = 0
    replication: int = 0
    tracked_colors: tuple[int, ...] | None = None
    checkpoints_per_decade: int = 64
    capture_history: bool | None = None
    max_colors: int | None = None

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ValidationError("horizon must be at least 1")
        if self.replication < 0:
            raise ValidationError("replication index must be nonnegative")
        if self.tracked_colors is not None:
            tracked = tuple(int(c) for c in self.tracked_colors)
            if any(c < 1 for c in tracked):
                raise ValidationError("tracked colors are 1-based labels")
            object.__setattr__(self, "tracked_colors", tracked)
        if self.max_colors is not None and self.max_colors < 1:
            raise ValidationError("max_colors must be at least 1")

    def config_dict(self) -> dict:
        return {
            "schedule": self.schedule.config(),
            "update": self.update.config(),
            "horizon": self.horizon,
            "seed": self.seed,
            "replication": self.replication,
            "tracked_colors": list(self.tracked_colors)
            if self.tracked_colors is not None else None,
            "checkpoints_per_decade": self.checkpoints_per_decade,
            "capture_history": self.capture_history,
            "max_colors": self.max_colors,
        }

    @classmethod
    def from_config_dict(cls, data: dict) -> "SimulationConfig":
        tracked = data.get("tracked_colors")
        return cls(
            schedule=schedule_from_config(data["schedule"]),
            update=update_from_config(data["update"]),
            horizon=int(data["horizon"]),
            seed=int(data.get("seed", 0)),
            replication=int(data.get("replication", 0)),
            tracked_colors=tuple(tracked) if tracked is not None else None,
            checkpoints_per_decade=int(data.get("checkpoints_per_decade", 64)),
            capture_history=data.get("capture_history"),
            max_colors=data.get("max_colors"),
        )


@dataclass(frozen=True)
class Trace:
    """Checkpointed outcome of one replication.

    Serializes to canonical JSON (sorted keys, no timestamps), so two
    runs of the same config and seed produce byte-identical documents.
    """

    seed: int
    replication: int
    config: dict
    checkpoints: tuple[tuple[int, int], ...]
    tracked: dict[int, tuple[tuple[int, int], ...]]
    final_counts: tuple[int, ...]
    history: tuple[int, ...] | None

    @property
    def horizon(self) -> int:
        return int(self.config["horizon"])

    @property
    def num_colors(self) -> int:
        return len(self.final_counts)

    def to_json(self) -> str:
        doc = {
            "checkpoints": [[n, c] for n, c in self.checkpoints],
            "config": self.config,
            "final_counts": list(self.final_counts),
            "history": list(self.history) if self.history is not None else None,
            "replication": self.replication,
            "seed": self.seed,
            "tracked": {str(c): [[n, k] for n, k in traj]
                        for c, traj in self.tracked.items()},
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "Trace":
        doc = json.loads(text)
        return cls(
            seed=int(doc["seed"]),
            replication=int(doc["replication"]),
            config=doc["config"],
            checkpoints=tuple((int(n), int(c)) for n, c in doc["checkpoints"]),
            tracked={int(c): tuple((int(n), int(k)) for n, k in traj)
                     for c, traj in doc["tracked"].items()},
            final_counts=tuple(int(k) for k in doc["final_counts"]),
            history=tuple(int(s) for s in doc["history"])
            if doc.get("history") is not None else None,
        )

    def write_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
            fh.write("\n")

    def write_csv_dir(self, dirpath) -> None:
        """One CSV per trajectory: colors over time, each tracked count,
        and the final count vector."""
        os.makedirs(dirpath, exist_ok=True)
        with open(os.path.join(dirpath, "colors.csv"), "w", newline="",
                  encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "colors"])
            w.writerows(self.checkpoints)
        for c, traj in sorted(self.tracked.items()):
            with open(os.path.join(dirpath, f"color_{c}.csv"), "w", newline="",
                      encoding="utf-8") as fh:
                w = csv.writer(fh)
                w.writerow(["n", "count"])
                w.writerows(traj)
        with open(os.path.join(dirpath, "final_counts.csv"), "w", newline="",
                  encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["color", "count"])
            w.writerows(enumerate(self.final_counts, start=1))

    def write_history(self, path) -> None:
        """One color label per line, decimal integers, UTF-8."""
        if self.history is None:
            raise ValidationError("trace was run without history capture")
        with open(path, "w", encoding="utf-8") as fh:
            for s in self.history:
                fh.write(f"{s}\n")


_PROB_CHUNK = 8192


def simulate(config: SimulationConfig) -> Trace:
    """Run one replication to its horizon; deterministic given the seed."""
    horizon = config.horizon
    schedule = config.schedule
    source = UniformSource(replication_generator(config.seed, config.replication))
    state = UrnState(config.update,
                     capacity_hint=min(1 << 14, max(16, horizon // 4)),
                     max_colors=config.max_colors)

    capture = config.capture_history
    if capture is None:
        capture = horizon <= 10_000
    history: list[int] | None = [] if capture else None

    times = checkpoint_times(horizon, config.checkpoints_per_decade)
    checkpoints: list[tuple[int, int]] = []

    dynamic_tracking = config.tracked_colors is None
    if dynamic_tracking:
        tracked_ids = [1, 2]
        late_birth_floor = math.ceil(horizon / 10)
    else:
        tracked_ids = list(config.tracked_colors)
        late_birth_floor = None
    tracked: dict[int, list[tuple[int, int]]] = {c: [] for c in tracked_ids}
    third_slot_open = dynamic_tracking

    counts = state.counts
    next_draw = source.next
    next_idx = 0
    next_time = times[0]

    for base in range(0, horizon, _PROB_CHUNK):
        hi = min(base + _PROB_CHUNK, horizon)
        ps = schedule.prob_slice(base, hi)
        for off in range(hi - base):
            if next_draw() < ps[off]:
                c = state.add_new_color()
                if third_slot_open and c >= 3 and state.n > late_birth_floor:
                    third_slot_open = False
                    tracked_ids.append(c)
                    tracked[c] = []
            else:
                c = state.select_color(next_draw())
                state.repeat_color(c)
            if history is not None:
                history.append(c)
            now = base + off + 1
            if now == next_time:
                checkpoints.append((now, len(counts)))
                for tc in tracked_ids:
                    if tc <= len(counts):
                        tracked[tc].append((now, counts[tc - 1]))
                next_idx += 1
                next_time = times[next_idx] if next_idx < len(times) else 0

    return Trace(
        seed=config.seed,
        replication=config.replication,
        config=config.config_dict(),
        checkpoints=tuple(checkpoints),
        tracked={c: tuple(traj) for c, traj in tracked.items()},
        final_counts=tuple(counts),
        history=tuple(history) if history is not None else None,
    )


def replicate(config: SimulationConfig, replications: int,
              threads: int | None = None) -> list[Trace]:
    """Run independent replications; replication r draws from the
    derived stream (seed, r), so results do not depend on scheduling."""
    if replications < 1:
        raise ValidationError("need at least one replication")
    configs = [dataclasses.replace(config, replication=r)
               for r in range(replications)]
    if threads is None:
        threads = os.cpu_count() or 1
    if threads <= 1 or replications == 1:
        return [simulate(c) for c in configs]
    with ProcessPoolExecutor(max_workers=min(threads, replications)) as pool:
        chunk = max(1, replications // (4 * threads))
        return list(pool.map(simulate, configs, chunksize=chunk))


# ---------------------------------------------------------------------------
# Exact path probabilities and brute-force enumeration


def validate_history(history: Sequence[int]) -> None:
    """Well-formedness: first symbol 1; each new label is 1 + prior max."""
    if len(history) == 0:
        raise ValidationError("history is empty")
    if history[0] != 1:
        raise ValidationError("history must start with color 1")
    seen = 0
    for t, s in enumerate(history):
        s = int(s)
        if s < 1:
            raise ValidationError(f"bad color label {s} at position {t}")
        if s > seen + 1:
            raise ValidationError(
                f"color {s} appears at position {t} before color {seen + 1}")
        if s == seen + 1:
            seen += 1


def path_probability(history: Sequence[int], schedule: TriggerSchedule,
                     update: UpdateFunction) -> float:
    """Exact probability that the urn produces exactly this history.

    Computed in plain linear arithmetic; for many hundreds of steps the
    value underflows toward 0, which is the honest answer at double
    precision.
    """
    validate_history(history)
    counts: list[int] = []
    total = 0.0
    prob = 1.0
    for t, s in enumerate(history):
        p = schedule.probability(t)
        if s == len(counts) + 1:
            prob *= p
            counts.append(1)
            total += update(1)
        else:
            k = counts[s - 1]
            prob *= (1.0 - p) * (update(k) / total)
            counts[s - 1] = k + 1
            total += update(k + 1) - update(k)
    return prob


ENUMERATION_LIMIT = 12


@dataclass(frozen=True)
class Enumeration:
    """Exact joint law over all histories of a short horizon.

    ``colors`` is the law of the number of distinct colors; ``counts``
    maps color c to the law of its observation count (including mass at
    0 for never-born); ``spectrum`` maps k to the law of the number of
    colors observed exactly k times. ``paths`` maps each history to its
    probability when path storage was requested.
    """

    horizon: int
    colors: ExactDistribution
    counts: dict[int, ExactDistribution]
    spectrum: dict[int, ExactDistribution]
    paths: dict[tuple[int, ...], float] | None
    total_probability: float

    def expected_count(self, c: int) -> float:
        return self.counts[c].mean()

    def expected_spectrum(self) -> dict[int, float]:
        return {k: dist.mean() for k, dist in self.spectrum.items()}


def enumerate_exact(n: int, schedule: TriggerSchedule, update: UpdateFunction,
                    *, store_paths: bool | None = None) -> Enumeration:
    """Walk every possible history of length n and accumulate exact laws.

    The number of histories is the n-th Bell number, which is why the
    horizon is refused beyond ENUMERATION_LIMIT (= 12, about 4.2e6
    paths). Path storage defaults to horizons at most 10.
    """
    if n < 1:
        raise ValidationError("horizon must be at least 1")
    if n > ENUMERATION_LIMIT:
        raise ValidationError(
            f"enumeration horizon capped at {ENUMERATION_LIMIT} "
            f"(the path count grows like the Bell numbers); got {n}")
    if store_paths is None:
        store_paths = n <= 10
    ps = [schedule.probability(t) for t in range(n)]

    colors_acc = np.zeros(n + 1)          # index: C_n in 1..n
    counts_acc = {c: np.zeros(n + 1) for c in range(1, n + 1)}
    spectrum_acc = {k: np.zeros(n + 1) for k in range(1, n + 1)}
    paths: dict[tuple[int, ...], float] | None = {} if store_paths else None

    counts: list[int] = []
    path: list[int] = []
    leaf_probs: list[float] = []

    def leaf(prob: float) -> None:
        leaf_probs.append(prob)
        C = len(counts)
        colors_acc[C] += prob
        for c in range(1, n + 1):
            k = counts[c - 1] if c <= C else 0
            counts_acc[c][k] += prob
        for k in range(1, n + 1):
            q = sum(1 for kc in counts if kc == k)
            spectrum_acc[k][q] += prob
        if paths is not None:
            paths[tuple(path)] = prob

    def walk(t: int, total: float, prob: float) -> None:
        if t == n:
            leaf(prob)
            return
        p = ps[t]
        # branch: brand-new color
        if p > 0.0:
            counts.append(1)
            path.append(len(counts))
            walk(t + 1, total + update(1), prob * p)
            path.pop()
            counts.pop()
        # branches: repeat each existing color
        if counts and p < 1.0:
            q = 1.0 - p
            for c in range(1, len(counts) + 1):
                k = counts[c - 1]
                w = update(k)
                counts[c - 1] = k + 1
                path.append(c)
                walk(t + 1, total + update(k + 1) - w, prob * q * w / total)
                path.pop()
                counts[c - 1] = k
        return

    walk(0, 0.0, 1.0)

    total_probability = math.fsum(leaf_probs)
    if abs(total_probability - 1.0) > 1e-12:
        raise RuntimeError(
            f"enumeration mass {total_probability!r} differs from 1 "
            "beyond tolerance; numerical breakdown")

    colors = ExactDistribution(1, colors_acc[1:])
    counts_dists = {c: ExactDistribution(0, acc)
                    for c, acc in counts_acc.items()}
    spectrum_dists = {k: ExactDistribution(0, acc)
                      for k, acc in spectrum_acc.items()}
    return Enumeration(
        horizon=n,
        colors=colors,
        counts=counts_dists,
        spectrum=spectrum_dists,
        paths=paths,
        total_probability=total_probability,
    )
