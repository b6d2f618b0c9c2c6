"""Seeding policy and buffered uniform draws.

Replication r of a run with master seed s draws from a Philox stream
keyed by ``SeedSequence(s, spawn_key=(r,))``: streams are independent of
the order replications execute in, and the counter-based generator is
cheap to ship across process boundaries.
"""

from __future__ import annotations

import numpy as np

BUFFER_SIZE = 8192


def replication_generator(master_seed: int, replication: int = 0) -> np.random.Generator:
    """Independent generator for one replication of a seeded run."""
    seq = np.random.SeedSequence(master_seed, spawn_key=(replication,))
    return np.random.Generator(np.random.Philox(seq))


class UniformSource:
    """Stream of uniforms in [0, 1), drawn from a Generator in blocks."""

    __slots__ = ("_gen", "_buf", "_pos")

    def __init__(self, gen: np.random.Generator) -> None:
        self._gen = gen
        self._buf = gen.random(BUFFER_SIZE)
        self._pos = 0

    def next(self) -> float:
        pos = self._pos
        if pos == BUFFER_SIZE:
            self._buf = self._gen.random(BUFFER_SIZE)
            pos = 0
        self._pos = pos + 1
        return self._buf[pos]
