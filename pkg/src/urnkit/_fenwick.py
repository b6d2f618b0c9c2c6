"""Cumulative-weight index over a growable list of positive weights.

This is the sampling structure behind the urn: it supports appending a
new weight, updating an existing one, prefix sums and inverse-cdf search,
all in O(log C) for C current items. A plain copy of the weights is kept
next to the tree so the whole structure can be rebuilt exactly; the
engine does that periodically to shed accumulated floating-point drift.
"""

from __future__ import annotations

import math
from typing import Iterable


class CumulativeWeights:
    """Binary-indexed tree over 1-based item indices."""

    __slots__ = ("_tree", "_weights", "_cap")

    def __init__(self, capacity_hint: int = 1024) -> None:
        cap = 1
        while cap < capacity_hint:
            cap *= 2
        self._cap = cap
        self._tree = [0.0] * (cap + 1)
        self._weights: list[float] = []

    def __len__(self) -> int:
        return len(self._weights)

    def weight(self, index: int) -> float:
        """Current weight of 1-based ``index``."""
        return self._weights[index - 1]

    def append(self, weight: float) -> None:
        """Add a new item with the given positive weight."""
        if not weight > 0.0:
            raise ValueError("weights must be positive")
        if len(self._weights) == self._cap:
            self.rebuild(self._weights, capacity=self._cap * 2)
        self._weights.append(weight)
        self._add(len(self._weights), weight)

    def update(self, index: int, weight: float) -> None:
        """Set the weight of an existing item."""
        if not weight > 0.0:
            raise ValueError("weights must be positive")
        if not 1 <= index <= len(self._weights):
            raise IndexError(index)
        self._add(index, weight - self._weights[index - 1])
        self._weights[index - 1] = weight

    def _add(self, i: int, delta: float) -> None:
        tree = self._tree
        cap = self._cap
        while i <= cap:
            tree[i] += delta
            i += i & -i

    def prefix(self, i: int) -> float:
        """Sum of the weights of items 1..i."""
        s = 0.0
        tree = self._tree
        while i > 0:
            s += tree[i]
            i -= i & -i
        return s

    def total(self) -> float:
        return self.prefix(len(self._weights))

    def find(self, target: float) -> int:
        """Smallest 1-based index whose prefix sum exceeds ``target``.

        For target drawn uniformly from [0, total) this selects item i
        with probability weight(i)/total. Targets at or above the total
        (possible through rounding of the caller's total) clamp to the
        last item.
        """
        pos = 0
        mask = self._cap
        tree = self._tree
        while mask:
            nxt = pos + mask
            if nxt <= self._cap and tree[nxt] <= target:
                target -= tree[nxt]
                pos = nxt
            mask >>= 1
        return min(pos + 1, len(self._weights))

    def rebuild(self, weights: Iterable[float], capacity: int | None = None) -> None:
        """Replace the whole contents in O(capacity) from a weight sequence."""
        weights = list(weights)
        cap = capacity if capacity is not None else self._cap
        while cap < len(weights):
            cap *= 2
        tree = [0.0] * (cap + 1)
        tree[1: len(weights) + 1] = weights
        # propagate over the full capacity, not just the filled prefix:
        # find() descends through the high nodes, so they must hold their
        # subtree sums even when the subtree is mostly empty
        for i in range(1, cap + 1):
            j = i + (i & -i)
            if j <= cap:
                tree[j] += tree[i]
        self._cap = cap
        self._tree = tree
        self._weights = weights

    def exact_total(self) -> float:
        """Compensated sum of the stored weights (independent of the tree)."""
        return math.fsum(self._weights)
