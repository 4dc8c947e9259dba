"""Points, metric and closed-form Frechet means on the K-spider.

The K-spider is K copies of the half-line [0, inf) glued at 0. A point is
either the origin or a pair (leg, x) with x > 0; legs are numbered 1..K.
Distances between points on different legs run through the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class InvalidPointError(ValueError):
    """A point does not live on the spider it is used with."""


class EmptySampleError(ValueError):
    pass


@dataclass(frozen=True)
class SpiderPoint:
    """A point of S_K. ``leg is None`` encodes the origin.

    Points built with ``x == 0`` are normalized to the origin; the leg they
    were given with is dropped.
    """

    leg: int | None
    x: float = 0.0

    def __post_init__(self):
        x = float(self.x)
        if math.isnan(x) or x < 0.0 or math.isinf(x):
            raise InvalidPointError(f"distance along a leg must be finite and >= 0, got {self.x!r}")
        if x == 0.0 or self.leg is None:
            if self.leg is None and x != 0.0:
                raise InvalidPointError("the origin has no position along a leg")
            object.__setattr__(self, "leg", None)
            object.__setattr__(self, "x", 0.0)
            return
        if not isinstance(self.leg, (int, np.integer)) or self.leg < 1:
            raise InvalidPointError(f"leg index must be a positive integer, got {self.leg!r}")
        object.__setattr__(self, "leg", int(self.leg))
        object.__setattr__(self, "x", x)

    @classmethod
    def origin(cls) -> SpiderPoint:
        return cls(None, 0.0)

    @property
    def is_origin(self) -> bool:
        return self.leg is None

    def check(self, K: int) -> None:
        if self.leg is not None and self.leg > K:
            raise InvalidPointError(f"leg {self.leg} does not exist on a {K}-spider")

    def to_json(self) -> dict:
        if self.is_origin:
            return {"origin": True}
        return {"leg": self.leg, "x": self.x}

    @classmethod
    def from_json(cls, obj: dict) -> SpiderPoint:
        if obj.get("origin"):
            return cls.origin()
        return cls(int(obj["leg"]), float(obj["x"]))

    def __repr__(self):
        if self.is_origin:
            return "SpiderPoint(origin)"
        return f"SpiderPoint(leg={self.leg}, x={self.x!r})"


ORIGIN = SpiderPoint.origin()


def _check_K(K: int) -> None:
    if K < 3:
        raise ValueError(f"a spider needs at least 3 legs, got K={K}")


def _check_leg(k: int, K: int) -> None:
    if not 1 <= k <= K:
        raise InvalidPointError(f"leg {k} out of range 1..{K}")


def distance(p: SpiderPoint, q: SpiderPoint, K: int) -> float:
    """Path length between two points, through the origin across legs."""
    p.check(K)
    q.check(K)
    if p.is_origin or q.is_origin or p.leg == q.leg:
        return abs(p.x - q.x)
    return p.x + q.x


def fold(k: int, p: SpiderPoint, K: int | None = None) -> float:
    """k-th folding map: leg k onto the positive reals, every other leg onto the negative ones."""
    if K is not None:
        _check_leg(k, K)
        p.check(K)
    elif k < 1:
        raise InvalidPointError(f"leg index must be >= 1, got {k}")
    if p.is_origin:
        return 0.0
    return p.x if p.leg == k else -p.x


@dataclass(frozen=True)
class SpiderSample:
    K: int
    points: tuple[SpiderPoint, ...]

    def __init__(self, K: int, points: Iterable[SpiderPoint]):
        _check_K(K)
        pts = tuple(points)
        if not pts:
            raise EmptySampleError("a sample needs at least one point")
        for p in pts:
            p.check(K)
        object.__setattr__(self, "K", int(K))
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return len(self.points)

    def __len__(self):
        return len(self.points)

    @classmethod
    def from_pairs(cls, K: int, pairs: Sequence[tuple[int | None, float]]) -> SpiderSample:
        """Build from ``(leg, x)`` pairs, e.g. ``[(1, 3.0), (2, 1.0)]``."""
        return cls(K, [SpiderPoint(leg, x) for leg, x in pairs])


@dataclass(frozen=True)
class SampleFoldedSummary:
    """Sample folded means ``eta`` and per-leg mass sums ``h`` (length K, leg k at index k-1)."""

    eta: np.ndarray
    h: np.ndarray
    n: int


def folded_sample_summary(sample: SpiderSample) -> SampleFoldedSummary:
    K, n = sample.K, sample.n
    per_leg: list[list[float]] = [[] for _ in range(K)]
    for p in sample.points:
        if not p.is_origin:
            per_leg[p.leg - 1].append(p.x)
    h = np.array([math.fsum(xs) / n for xs in per_leg])
    # eta_k = (sum on leg k - sum elsewhere) / n; fsum is correctly rounded so the sign is exact
    eta = np.empty(K)
    for k in range(K):
        terms = list(per_leg[k])
        for i in range(K):
            if i != k:
                terms.extend(-x for x in per_leg[i])
        eta[k] = math.fsum(terms) / n
    return SampleFoldedSummary(eta=eta, h=h, n=n)


def mean_from_eta(eta: Sequence[float]) -> SpiderPoint:
    """Sample mean implied by the folded means: the unique positive one, else the origin."""
    for k, e in enumerate(eta, start=1):
        if e > 0.0:
            return SpiderPoint(k, float(e))
    return ORIGIN


def frechet_sample_mean(sample: SpiderSample) -> SpiderPoint:
    return mean_from_eta(folded_sample_summary(sample).eta)


def frechet_function_value(sample: SpiderSample, p: SpiderPoint) -> float:
    """Average squared distance from the sample to ``p``."""
    p.check(sample.K)
    return math.fsum(distance(x, p, sample.K) ** 2 for x in sample.points) / sample.n
