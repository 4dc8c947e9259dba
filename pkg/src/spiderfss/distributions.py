"""Finitely supported laws on the K-spider.

Exact folded moments and population means are computed atom by atom. Sampling
goes through a Vose alias table; every replication draws from its own
generator, seeded from ``(master_seed, replication_index)`` only, so results
do not depend on which worker ran which replication.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .spider import ORIGIN, SpiderPoint, SpiderSample, _check_K, distance

_MASK64 = (1 << 64) - 1


class DistributionError(ValueError):
    pass


@dataclass(frozen=True)
class DiscreteSpiderDistribution:
    """Atoms on S_K with positive probabilities.

    Duplicate points are merged. Probabilities must sum to one within
    ``atol`` and are then renormalized.
    """

    K: int
    atoms: tuple[tuple[SpiderPoint, float], ...]
    legs: np.ndarray = field(repr=False, compare=False)
    xs: np.ndarray = field(repr=False, compare=False)
    probs: np.ndarray = field(repr=False, compare=False)

    def __init__(self, K: int, atoms: Iterable[tuple[SpiderPoint, float]], atol: float = 1e-12):
        _check_K(K)
        merged: dict[SpiderPoint, list[float]] = {}
        for point, prob in atoms:
            point.check(K)
            prob = float(prob)
            if not prob > 0.0 or not math.isfinite(prob):
                raise DistributionError(f"atom probabilities must be positive, got {prob!r} at {point!r}")
            merged.setdefault(point, []).append(prob)
        if not merged:
            raise DistributionError("a distribution needs at least one atom")
        total = math.fsum(p for ps in merged.values() for p in ps)
        if abs(total - 1.0) > atol:
            raise DistributionError(f"probabilities sum to {total!r}, not 1")
        items = tuple((pt, math.fsum(ps) / total) for pt, ps in merged.items())
        object.__setattr__(self, "K", int(K))
        object.__setattr__(self, "atoms", items)
        object.__setattr__(self, "legs", np.array([0 if p.is_origin else p.leg for p, _ in items], dtype=np.int64))
        object.__setattr__(self, "xs", np.array([p.x for p, _ in items]))
        object.__setattr__(self, "probs", np.array([w for _, w in items]))

    @classmethod
    def from_pairs(cls, K: int, triples: Sequence[tuple[int | None, float, float]]) -> DiscreteSpiderDistribution:
        """Build from ``(leg, x, prob)`` triples."""
        return cls(K, [(SpiderPoint(leg, x), p) for leg, x, p in triples])

    def __len__(self):
        return len(self.atoms)

    @property
    def leg_mass(self) -> np.ndarray:
        mass = np.zeros(self.K)
        for leg in range(1, self.K + 1):
            mass[leg - 1] = math.fsum(self.probs[self.legs == leg])
        return mass

    @property
    def nondegenerate(self) -> bool:
        """True when at least three legs carry positive mass."""
        return int(np.count_nonzero(self.leg_mass > 0.0)) >= 3

    def fold_matrix(self) -> np.ndarray:
        """``F[a, k-1]`` is the k-th fold of atom ``a``."""
        on_leg = self.legs[:, None] == np.arange(1, self.K + 1)[None, :]
        return np.where(on_leg, self.xs[:, None], -self.xs[:, None])

    def to_json(self) -> dict:
        return {
            "K": self.K,
            "atoms": [
                {"leg": 0 if p.is_origin else p.leg, "x": p.x, "p": w} for p, w in self.atoms
            ],
        }


def load_distribution(path: str | os.PathLike) -> DiscreteSpiderDistribution:
    with open(path) as fh:
        return distribution_from_json(json.load(fh))


def distribution_from_json(obj: dict) -> DiscreteSpiderDistribution:
    try:
        K = int(obj["K"])
        atoms = []
        for a in obj["atoms"]:
            x = float(a["x"])
            point = ORIGIN if x == 0.0 else SpiderPoint(int(a["leg"]), x)
            atoms.append((point, float(a["p"])))
    except (KeyError, TypeError, ValueError) as exc:
        raise DistributionError(f"malformed distribution: {exc}") from exc
    return DiscreteSpiderDistribution(K, atoms, atol=1e-9)


@dataclass(frozen=True)
class PopulationFoldedSummary:
    """Per-leg folded moments, leg k at index k-1."""

    m: np.ndarray
    sigma2: np.ndarray
    abs_central_third: np.ndarray
    third_at_origin: float
    leg_mass: np.ndarray

    @property
    def K(self) -> int:
        return len(self.m)

    @property
    def sigma(self) -> np.ndarray:
        return np.sqrt(self.sigma2)


def population_folded_summary(dist: DiscreteSpiderDistribution) -> PopulationFoldedSummary:
    F = dist.fold_matrix()
    p = dist.probs
    K = dist.K
    m = np.array([math.fsum(p * F[:, k]) for k in range(K)])
    centered = F - m[None, :]
    sigma2 = np.array([math.fsum(p * centered[:, k] ** 2) for k in range(K)])
    third = np.array([math.fsum(p * np.abs(centered[:, k]) ** 3) for k in range(K)])
    return PopulationFoldedSummary(
        m=m,
        sigma2=sigma2,
        abs_central_third=third,
        third_at_origin=math.fsum(p * dist.xs**3),
        leg_mass=dist.leg_mass,
    )


def population_frechet_mean(dist: DiscreteSpiderDistribution) -> SpiderPoint:
    m = population_folded_summary(dist).m
    k = int(np.argmax(m))
    if m[k] > 0.0:
        return SpiderPoint(k + 1, float(m[k]))
    return ORIGIN


def variance_about_mean(dist: DiscreteSpiderDistribution) -> float:
    """E[d^2(X, mu)] for the population mean mu."""
    mu = population_frechet_mean(dist)
    return math.fsum(w * distance(pt, mu, dist.K) ** 2 for pt, w in dist.atoms)


def example_xt(K: int, t: float) -> DiscreteSpiderDistribution:
    """Mass 1/K at (K-1+K t) on leg K and at 1 on each of legs 1..K-1.

    The population mean sits at distance t on leg K, so the mean is
    nonsticky for every t > 0.
    """
    if K < 3:
        raise DistributionError(f"K must be >= 3, got {K}")
    if not t > 0.0:
        raise DistributionError(f"t must be positive, got {t}")
    atoms = [(SpiderPoint(i, 1.0), 1.0 / K) for i in range(1, K)]
    atoms.append((SpiderPoint(K, K - 1 + K * t), 1.0 / K))
    return DiscreteSpiderDistribution(K, atoms)


# -- sampling -----------------------------------------------------------------


def splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def stream_seed(master_seed: int, replication: int) -> int:
    """64-bit seed for one replication; injective in ``replication`` for a fixed master seed."""
    return splitmix64(splitmix64(master_seed & _MASK64) ^ (replication & _MASK64))


def stream_rng(master_seed: int, replication: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(stream_seed(master_seed, replication)))


class AliasSampler:
    """O(1) draws of atom indices (Vose's construction)."""

    def __init__(self, dist: DiscreteSpiderDistribution):
        self.dist = dist
        self.prob, self.alias = vose_alias_table(dist.probs)

    def draw_indices(self, n: int, rng: np.random.Generator) -> np.ndarray:
        A = len(self.prob)
        scaled = rng.random(n) * A
        col = np.minimum(scaled.astype(np.int64), A - 1)
        return np.where(scaled - col < self.prob[col], col, self.alias[col])

    def draw_counts(self, n: int, master_seed: int, replication: int) -> np.ndarray:
        idx = self.draw_indices(n, stream_rng(master_seed, replication))
        return np.bincount(idx, minlength=len(self.prob))

    def draw_sample(self, n: int, master_seed: int, replication: int) -> SpiderSample:
        if n < 1:
            raise ValueError("sample size must be >= 1")
        idx = self.draw_indices(n, stream_rng(master_seed, replication))
        pts = [a[0] for a in self.dist.atoms]
        return SpiderSample(self.dist.K, [pts[i] for i in idx])


def vose_alias_table(probs: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    probs = np.asarray(probs, dtype=float)
    A = len(probs)
    scaled = probs * (A / probs.sum())
    prob = np.zeros(A)
    alias = np.arange(A)
    small = [i for i in range(A) if scaled[i] < 1.0]
    large = [i for i in range(A) if scaled[i] >= 1.0]
    while small and large:
        s = small.pop()
        g = large.pop()
        prob[s] = scaled[s]
        alias[s] = g
        # stable update: subtract the deficit rather than recomputing the sum
        scaled[g] = (scaled[g] + scaled[s]) - 1.0
        (small if scaled[g] < 1.0 else large).append(g)
    for i in large + small:
        prob[i] = 1.0
        alias[i] = i
    return prob, alias


def build_sampler(dist: DiscreteSpiderDistribution) -> AliasSampler:
    return AliasSampler(dist)


def draw_sample(sampler: AliasSampler, n: int, stream_key: tuple[int, int]) -> SpiderSample:
    master, rep = stream_key
    return sampler.draw_sample(n, master, rep)
