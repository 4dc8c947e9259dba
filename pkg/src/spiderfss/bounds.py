"""Berry-Esseen bounds on the variance modulation and stickiness certificates.

For a nondegenerate law whose Frechet mean lies on leg k (m_k > 0), with
Berry-Esseen constant C_S:

    p_n    = sum_i Phi(sqrt(n) m_i / s_i) + C_S sum_i E|F_i - m_i|^3 / (sqrt(n) s_i^3)
    p_n,k  = Phi(sqrt(n) m_k / s_k) - C_S E|F_k - m_k|^3 / (sqrt(n) s_k^3)
    bound  = p_n + n m_k^2 / s_k^2 (1 - p_n,k)

``certify`` scans every integer n in {N, ..., N**l}. A certificate is issued
when p_n < 1, p_n,k >= 0 and bound < 1 throughout; its level is
1 - max bound.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import ndtr

from ._workers import resolve_workers
from .distributions import DiscreteSpiderDistribution, PopulationFoldedSummary, population_folded_summary

BERRY_ESSEEN_CONSTANT = 0.4748
DEFAULT_SCAN_CAP = 2**32
_CHUNK = 1 << 20

CONDITIONS = ("p_n < 1", "p_nk >= 0", "bound < 1")


class BoundError(ValueError):
    pass


class DegenerateDistributionError(BoundError):
    pass


class StickyMeanError(BoundError):
    """No leg has a positive folded mean; the population mean is the origin."""


class SingularLegError(BoundError):
    pass


class ScanCapExceeded(BoundError, OverflowError):
    pass


class CertificationFailed(Exception):
    """A condition failed somewhere in the scanned range.

    ``n`` is the smallest failing sample size and ``condition`` the first of
    :data:`CONDITIONS` violated there.
    """

    def __init__(self, n: int, condition: str, values: BoundRow):
        self.n = n
        self.condition = condition
        self.values = values
        super().__init__(f"condition {condition!r} fails at n={n} "
                         f"(p_n={values.p_n:.6g}, p_nk={values.p_nk:.6g}, bound={values.bound:.6g})")


def std_normal_cdf(z):
    """Standard normal CDF, via scipy's ``ndtr`` (erfc-based, ~1e-16 absolute)."""
    return ndtr(z)


@dataclass(frozen=True)
class BoundInputs:
    summary: PopulationFoldedSummary
    K: int
    mean_leg: int

    def __post_init__(self):
        k = self.mean_leg
        if not 1 <= k <= self.K:
            raise BoundError(f"mean leg {k} out of range 1..{self.K}")
        if not self.summary.m[k - 1] > 0.0:
            raise StickyMeanError(f"folded mean on leg {k} is not positive")
        if np.count_nonzero(self.summary.leg_mass > 0.0) < 3:
            raise DegenerateDistributionError("fewer than three legs carry mass")
        bad = np.flatnonzero(~(self.summary.sigma2 > 0.0))
        if bad.size:
            raise SingularLegError(f"zero folded variance on leg(s) {[int(i) + 1 for i in bad]}")

    @classmethod
    def from_distribution(cls, dist: DiscreteSpiderDistribution) -> BoundInputs:
        if not dist.nondegenerate:
            raise DegenerateDistributionError("fewer than three legs carry mass")
        summary = population_folded_summary(dist)
        positive = np.flatnonzero(summary.m > 0.0)
        if positive.size == 0:
            raise StickyMeanError("population mean is the origin (sticky); no finite-sample bound applies")
        return cls(summary=summary, K=dist.K, mean_leg=int(positive[0]) + 1)


class BoundRow(NamedTuple):
    n: int
    p_n: float
    p_nk: float
    bound: float


def _terms(n: np.ndarray, inp: BoundInputs) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Elementwise p_n, p_n,k and bound. Legs are summed in a fixed order so
    every value is independent of how ``n`` is chunked."""
    s = inp.summary
    sigma = np.sqrt(s.sigma2)
    root_n = np.sqrt(n.astype(np.float64))
    nf = n.astype(np.float64)
    phi_sum = np.zeros_like(root_n)
    be_sum = np.zeros_like(root_n)
    for i in range(inp.K):
        phi_sum += std_normal_cdf(root_n * s.m[i] / sigma[i])
        be_sum += s.abs_central_third[i] / (root_n * sigma[i] ** 3)
    p_n = phi_sum + be_sum * BERRY_ESSEEN_CONSTANT
    k = inp.mean_leg - 1
    p_nk = (std_normal_cdf(root_n * s.m[k] / sigma[k])
            - s.abs_central_third[k] / (root_n * sigma[k] ** 3) * BERRY_ESSEEN_CONSTANT)
    bound = p_n + nf * s.m[k] ** 2 / s.sigma2[k] * (1.0 - p_nk)
    return p_n, p_nk, bound


def _check_n(n: int) -> None:
    if int(n) != n or n < 1:
        raise BoundError(f"sample size must be an integer >= 1, got {n!r}")


def _row(n: int, inp: BoundInputs) -> BoundRow:
    _check_n(n)
    p_n, p_nk, bound = _terms(np.array([n], dtype=np.int64), inp)
    return BoundRow(int(n), float(p_n[0]), float(p_nk[0]), float(bound[0]))


def p_upper(n: int, inp: BoundInputs) -> float:
    """Upper bound p_n on P(A), the chance that the sample mean lands on a leg. May exceed 1."""
    return _row(n, inp).p_n


def p_lower_k(n: int, inp: BoundInputs) -> float:
    """Lower bound p_n,k on P(A_k). Negative for small n."""
    return _row(n, inp).p_nk


def modulation_upper_bound(n: int, inp: BoundInputs) -> float:
    return _row(n, inp).bound


def bound_curve(n_grid: Sequence[int], inp: BoundInputs) -> list[BoundRow]:
    grid = np.asarray(n_grid)
    if grid.ndim != 1 or grid.size == 0:
        raise BoundError("n grid must be a nonempty 1-d sequence")
    for n in n_grid:
        _check_n(n)
    grid = grid.astype(np.int64)
    if np.any(np.diff(grid) <= 0):
        raise BoundError("n grid must be strictly ascending")
    p_n, p_nk, bound = _terms(grid, inp)
    return [BoundRow(int(a), float(b), float(c), float(d)) for a, b, c, d in zip(grid, p_n, p_nk, bound)]


@dataclass(frozen=True)
class StickinessCertificate:
    level: float
    scale: int
    base: int
    argmin_n: int  # n where 1 - bound is smallest
    max_bound: float
    min_bound: float

    @property
    def top(self) -> int:
        return self.base**self.scale


@dataclass(frozen=True)
class ScanResult:
    base: int
    scale: int
    max_bound: float
    argmax_n: int
    min_bound: float
    failure: tuple[int, str] | None


def _scan_chunk(start: int, stop: int, inp: BoundInputs):
    n = np.arange(start, stop, dtype=np.int64)
    p_n, p_nk, bound = _terms(n, inp)
    # written as negations so NaN counts as a violation
    bad = np.stack([~(p_n < 1.0), ~(p_nk >= 0.0), ~(bound < 1.0)])
    failure = None
    any_bad = bad.any(axis=0)
    if any_bad.any():
        j = int(np.argmax(any_bad))
        failure = (int(n[j]), CONDITIONS[int(np.argmax(bad[:, j]))])
    j = int(np.argmax(bound))
    return float(bound[j]), int(n[j]), float(bound.min()), failure


def _top(N: int, l: int, cap: int) -> int:
    if int(N) != N or N < 2:
        raise BoundError(f"base N must be an integer >= 2, got {N!r}")
    if int(l) != l or l < 2:
        raise BoundError(f"scale l must be an integer >= 2, got {l!r}")
    top = int(N) ** int(l)
    if top > cap:
        raise ScanCapExceeded(f"N**l = {N}**{l} = {top} exceeds the scan cap {cap}")
    return top


def scan_range(N: int, l: int, inp: BoundInputs, *, cap: int = DEFAULT_SCAN_CAP,
               workers: int | None = None, chunk: int = _CHUNK) -> ScanResult:
    """Evaluate the bound at every integer n in {N, ..., N**l}.

    Chunks may run on several threads; the reduction (largest bound, ties to
    the smaller n; first failure by smallest n) does not depend on the split.
    """
    top = _top(N, l, cap)
    bounds = [(a, min(a + chunk, top + 1)) for a in range(int(N), top + 1, chunk)]
    workers = min(resolve_workers(workers), len(bounds))
    if workers == 1:
        parts = [_scan_chunk(a, b, inp) for a, b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda ab: _scan_chunk(ab[0], ab[1], inp), bounds))
    max_bound, argmax_n = -np.inf, int(N)
    min_bound = np.inf
    failure = None
    for bmax, nmax, bmin, fail in parts:  # chunk order = ascending n
        if bmax > max_bound or (np.isnan(bmax) and not np.isnan(max_bound)):
            max_bound, argmax_n = bmax, nmax
        min_bound = min(min_bound, bmin)
        if failure is None and fail is not None:
            failure = fail
    return ScanResult(int(N), int(l), float(max_bound), argmax_n, float(min_bound), failure)


def certify(N: int, l: int, inp: BoundInputs, *, cap: int = DEFAULT_SCAN_CAP,
            workers: int | None = None) -> StickinessCertificate:
    """Certificate of finite sample stickiness with base N and scale l.

    Raises :class:`CertificationFailed` naming the smallest n at which a
    condition breaks.
    """
    res = scan_range(N, l, inp, cap=cap, workers=workers)
    if res.failure is not None:
        n, cond = res.failure
        raise CertificationFailed(n, cond, _row(n, inp))
    return StickinessCertificate(
        level=1.0 - res.max_bound,
        scale=int(l),
        base=int(N),
        argmin_n=res.argmax_n,
        max_bound=res.max_bound,
        min_bound=res.min_bound,
    )
