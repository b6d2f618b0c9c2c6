"""Probability-mass carriers used throughout the package.

``ExactDistribution`` is a finite pmf on consecutive nonnegative integers
(the law of a color count, a brute-force enumeration marginal, or a
Bernoulli-sum convolution). ``PoissonLaw`` wraps a Poisson distribution
and knows how to truncate itself to a finite carrier while reporting the
mass it dropped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import ValidationError

SUM_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class ExactDistribution:
    """Finite pmf with support offset, offset+1, ..., offset+len-1."""

    offset: int
    probs: np.ndarray

    def __post_init__(self) -> None:
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.ndim != 1 or probs.size == 0:
            raise ValidationError("probabilities must be a nonempty 1-d sequence")
        if self.offset < 0:
            raise ValidationError("support must be nonnegative")
        if np.any(probs < -1e-12):
            raise ValidationError("negative probability mass")
        total = float(probs.sum())
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise ValidationError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "probs", np.clip(probs, 0.0, None))

    def __len__(self) -> int:
        return len(self.probs)

    def support(self) -> range:
        return range(self.offset, self.offset + len(self.probs))

    def pmf(self, j: int) -> float:
        i = j - self.offset
        if 0 <= i < len(self.probs):
            return float(self.probs[i])
        return 0.0

    def mean(self) -> float:
        ks = np.arange(self.offset, self.offset + len(self.probs))
        return float(np.dot(ks, self.probs))

    def variance(self) -> float:
        ks = np.arange(self.offset, self.offset + len(self.probs))
        m = float(np.dot(ks, self.probs))
        return float(np.dot((ks - m) ** 2, self.probs))

    def trimmed(self, eps: float = 0.0) -> "ExactDistribution":
        """Drop leading/trailing mass <= eps (tidies enumeration output)."""
        probs = self.probs
        keep = np.flatnonzero(probs > eps)
        if keep.size == 0:
            return self
        lo, hi = int(keep[0]), int(keep[-1]) + 1
        return ExactDistribution(self.offset + lo, probs[lo:hi])

    def to_dict(self) -> dict:
        return {"offset": self.offset, "probs": [float(p) for p in self.probs]}

    @classmethod
    def from_dict(cls, data: dict) -> "ExactDistribution":
        return cls(int(data["offset"]), np.asarray(data["probs"], dtype=np.float64))

    @classmethod
    def point_mass(cls, value: int) -> "ExactDistribution":
        return cls(value, np.array([1.0]))


@dataclass(frozen=True)
class PoissonLaw:
    """Poisson distribution with mean ``lam`` on the full integer lattice."""

    lam: float

    def __post_init__(self) -> None:
        if not self.lam > 0.0:
            raise ValidationError("Poisson mean must be positive")

    def pmf(self, j) -> float:
        return stats.poisson.pmf(j, self.lam)

    def truncated(self, mass_tol: float = 1e-14) -> tuple[ExactDistribution, float]:
        """Finite carrier holding all but at most ``mass_tol`` of the mass.

        Returns the truncated pmf together with the dropped upper-tail
        mass (never silently discarded; callers fold it into reported
        uncertainties).
        """
        hi = int(stats.poisson.ppf(1.0 - mass_tol, self.lam))
        while stats.poisson.sf(hi, self.lam) > mass_tol:
            hi += max(1, hi // 10)
        probs = stats.poisson.pmf(np.arange(hi + 1), self.lam)
        dropped = float(stats.poisson.sf(hi, self.lam))
        return ExactDistribution(0, probs), dropped
