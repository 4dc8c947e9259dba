"""Monte Carlo estimates of the variance modulation of sample Frechet means.

Replication ``r`` at grid position ``j`` always draws from the stream
``(master_seed, j * B + r)``, so a configuration gives bit-identical output
for any number of workers.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._workers import resolve_workers
from .distributions import (
    AliasSampler,
    DiscreteSpiderDistribution,
    population_frechet_mean,
    variance_about_mean,
)

DEFAULT_REPLICATIONS = 10_000
DEFAULT_GRID_POINTS = 50


@dataclass(frozen=True)
class SimulationConfig:
    dist: DiscreteSpiderDistribution
    n_grid: tuple[int, ...]
    replications: int = DEFAULT_REPLICATIONS
    master_seed: int = 0

    def __post_init__(self):
        grid = tuple(int(n) for n in self.n_grid)
        if not grid:
            raise ValueError("n_grid must be nonempty")
        if any(n < 1 for n in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("n_grid must be strictly ascending positive integers")
        if self.replications < 2:
            raise ValueError("at least 2 replications are needed for a standard error")
        object.__setattr__(self, "n_grid", grid)


@dataclass(frozen=True, eq=False)
class ReplicationBatch:
    """Per-replication outcomes for one sample size, in replication order."""

    n: int
    eta: np.ndarray  # (B, K) sample folded means
    mean_leg: np.ndarray  # (B,) leg of the sample mean, 0 for the origin
    mean_x: np.ndarray  # (B,) distance of the sample mean from the origin
    sq_dist: np.ndarray  # (B,) squared distance to the population mean

    @property
    def B(self) -> int:
        return len(self.sq_dist)


@dataclass(frozen=True, eq=False)
class ModulationEstimate:
    n: int
    m_hat: float
    std_err: float
    event_freq: np.ndarray  # K+1 entries: mean on leg 1..K, then mean at the origin
    mean_sq_dist: float
    tie_freq: np.ndarray  # K entries: eta_{n,i} == 0 exactly (counted in the origin class)
    replications: int

    @property
    def K(self) -> int:
        return len(self.tie_freq)

    @property
    def freq_origin(self) -> float:
        return float(self.event_freq[-1])

    @property
    def freq_A(self) -> float:
        """Frequency of some eta_{n,i} >= 0, i.e. the union of the events A_i."""
        return float(self.event_freq[:-1].sum() + self.tie_freq.sum())

    def freq_A_leg(self, k: int) -> float:
        """Frequency of eta_{n,k} >= 0."""
        return float(self.event_freq[k - 1] + self.tie_freq[k - 1])


def binomial_se(freq: float, B: int) -> float:
    return math.sqrt(max(freq * (1.0 - freq), 0.0) / B)


def _run_block(dist: DiscreteSpiderDistribution, n: int, master_seed: int, first: int, last: int):
    sampler = AliasSampler(dist)
    F = dist.fold_matrix()
    K = dist.K
    eta = np.empty((last - first, K))
    for row, rep in enumerate(range(first, last)):
        counts = sampler.draw_counts(n, master_seed, rep)
        weighted = counts[:, None] * F
        for k in range(K):
            eta[row, k] = math.fsum(weighted[:, k]) / n
    return eta


def _mean_and_distance(eta: np.ndarray, mu_leg: int, mu_x: float):
    positive = eta > 0.0
    has_leg = positive.any(axis=1)
    leg = np.where(has_leg, np.argmax(positive, axis=1) + 1, 0)
    x = np.where(has_leg, eta.max(axis=1), 0.0)
    if mu_leg == 0:
        sq = x**2
    else:
        same = (leg == 0) | (leg == mu_leg)
        sq = np.where(same, (x - mu_x) ** 2, (x + mu_x) ** 2)
    return leg, x, sq


def replicate(cfg: SimulationConfig, n: int, *, stream_offset: int = 0,
              workers: int | None = None) -> ReplicationBatch:
    """Draw B samples of size n and record eta, the sample mean and d^2(mu_n, mu)."""
    if n < 1:
        raise ValueError("sample size must be >= 1")
    B = cfg.replications
    workers = min(resolve_workers(workers), B)
    edges = np.linspace(0, B, workers + 1).astype(int)
    spans = [(stream_offset + a, stream_offset + b) for a, b in zip(edges[:-1], edges[1:]) if b > a]
    if len(spans) == 1:
        blocks = [_run_block(cfg.dist, n, cfg.master_seed, *spans[0])]
    else:
        with ProcessPoolExecutor(max_workers=len(spans)) as pool:
            futures = [pool.submit(_run_block, cfg.dist, n, cfg.master_seed, a, b) for a, b in spans]
            blocks = [f.result() for f in futures]
    eta = np.concatenate(blocks)
    mu = population_frechet_mean(cfg.dist)
    leg, x, sq = _mean_and_distance(eta, 0 if mu.is_origin else mu.leg, mu.x)
    return ReplicationBatch(n=n, eta=eta, mean_leg=leg, mean_x=x, sq_dist=sq)


def summarize(batch: ReplicationBatch, dist: DiscreteSpiderDistribution) -> ModulationEstimate:
    B, K, n = batch.B, dist.K, batch.n
    denom = variance_about_mean(dist)
    if not denom > 0.0:
        raise ValueError("distribution is a point mass; the modulation is undefined")
    mean_sq = math.fsum(batch.sq_dist) / B
    var_sq = math.fsum((batch.sq_dist - mean_sq) ** 2) / (B - 1)
    classes = np.bincount(batch.mean_leg, minlength=K + 1)
    event_freq = np.concatenate([classes[1:], classes[:1]]) / B
    ties = np.count_nonzero(batch.eta == 0.0, axis=0) / B
    return ModulationEstimate(
        n=n,
        m_hat=n * mean_sq / denom,
        std_err=n / denom * math.sqrt(var_sq) / math.sqrt(B),
        event_freq=event_freq,
        mean_sq_dist=mean_sq,
        tie_freq=ties,
        replications=B,
    )


def _warn_degenerate(dist: DiscreteSpiderDistribution) -> None:
    if not dist.nondegenerate:
        warnings.warn("distribution is degenerate (mass on fewer than three legs)", stacklevel=3)


def estimate_modulation(cfg: SimulationConfig, n: int, *, stream_offset: int = 0,
                        workers: int | None = None) -> ModulationEstimate:
    _warn_degenerate(cfg.dist)
    return summarize(replicate(cfg, n, stream_offset=stream_offset, workers=workers), cfg.dist)


def modulation_curve(cfg: SimulationConfig, *, workers: int | None = None) -> list[ModulationEstimate]:
    """One estimate per grid size; grid position j uses streams j*B .. j*B + B-1."""
    _warn_degenerate(cfg.dist)
    B = cfg.replications
    return [
        summarize(replicate(cfg, n, stream_offset=j * B, workers=workers), cfg.dist)
        for j, n in enumerate(cfg.n_grid)
    ]


def log_grid(n_min: int, n_max: int, points: int = DEFAULT_GRID_POINTS) -> list[int]:
    """Roughly log-spaced distinct integers from n_min to n_max inclusive."""
    if n_min < 1 or n_max < n_min:
        raise ValueError("need 1 <= n_min <= n_max")
    if points < 1:
        raise ValueError("points must be >= 1")
    if points == 1:
        return [int(n_min)]
    raw = np.geomspace(n_min, n_max, points)
    return sorted({int(round(v)) for v in raw} | {int(n_min), int(n_max)})


def linear_grid(n_min: int, n_max: int, stride: int) -> list[int]:
    if n_min < 1 or n_max < n_min or stride < 1:
        raise ValueError("need 1 <= n_min <= n_max and stride >= 1")
    return list(range(int(n_min), int(n_max) + 1, int(stride)))
