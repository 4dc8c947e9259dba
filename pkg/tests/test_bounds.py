import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spiderfss.bounds import (
    BERRY_ESSEEN_CONSTANT,
    CONDITIONS,
    BoundError,
    BoundInputs,
    CertificationFailed,
    DegenerateDistributionError,
    ScanCapExceeded,
    StickyMeanError,
    bound_curve,
    certify,
    modulation_upper_bound,
    p_lower_k,
    p_upper,
    scan_range,
    std_normal_cdf,
)
from spiderfss.distributions import DiscreteSpiderDistribution, example_xt

import oracles

# phi values from oracles.phi (mpmath quadrature, 40 digits)
PHI_GOLDEN = {
    -8.0: 6.220960574271784123515995e-16,
    -4.0: 0.00003167124183311992125377076,
    -1.96: 0.02499789514822043621282369,
    -0.5: 0.3085375387259868963622954,
    0.0: 0.5,
    0.5: 0.6914624612740131036377046,
    1.96: 0.9750021048517795637871763,
    4.0: 0.9999683287581668800787462,
    8.0: 0.9999999999999993779039426,
}

# (p_n, p_nk, bound) for X_t(3, 0.01) from oracles.bound_terms
XT_GOLDEN = {
    1: (2.80200846664305, -0.0567641712549869, 2.80206026373016),
    100: (0.698765421433377, 0.471951661015422, 0.701353639936389),
    10_000: (0.775155156169782, 0.75247378761185, 0.896479640234163),
}


@pytest.fixture(scope="module")
def xt():
    return BoundInputs.from_distribution(example_xt(3, 0.01))


def test_constant():
    assert BERRY_ESSEEN_CONSTANT == 0.4748


@pytest.mark.parametrize("z", sorted(PHI_GOLDEN))
def test_phi_golden(z):
    assert abs(std_normal_cdf(z) - PHI_GOLDEN[z]) <= 1e-15


def test_phi_live_oracle():
    for z in (-3.3, -0.01, 0.77, 2.5):
        assert abs(std_normal_cdf(z) - float(oracles.phi(z))) <= 1e-15


@given(st.floats(-30, 30))
def test_phi_symmetry(z):
    assert abs(std_normal_cdf(-z) + std_normal_cdf(z) - 1.0) <= 1e-15


def test_phi_monotone():
    z = np.linspace(-10, 10, 200_001)
    assert np.all(np.diff(std_normal_cdf(z)) >= 0)


@pytest.mark.parametrize("n", sorted(XT_GOLDEN))
def test_xt_bound_values(xt, n):
    p_n, p_nk, bound = XT_GOLDEN[n]
    assert p_upper(n, xt) == pytest.approx(p_n, abs=1e-12)
    assert p_lower_k(n, xt) == pytest.approx(p_nk, abs=1e-12)
    assert modulation_upper_bound(n, xt) == pytest.approx(bound, abs=1e-12)


def test_small_n_lower_bound_negative(xt):
    assert p_lower_k(1, xt) < 0


@given(st.integers(1, 10**9))
def test_p_upper_dominates_mean_leg_phi(n):
    inp = BoundInputs.from_distribution(example_xt(3, 0.01))
    s = inp.summary
    assert p_upper(n, inp) >= std_normal_cdf(math.sqrt(n) * s.m[2] / math.sqrt(s.sigma2[2]))


def test_bound_curve(xt):
    rows = bound_curve([100, 10_000], xt)
    for row in rows:
        assert row[1:] == pytest.approx(XT_GOLDEN[row.n], abs=1e-12)
    (single,) = bound_curve([777], xt)
    assert single == (777, p_upper(777, xt), p_lower_k(777, xt), modulation_upper_bound(777, xt))
    with pytest.raises(BoundError):
        bound_curve([100, 50], xt)
    with pytest.raises(BoundError):
        bound_curve([], xt)


def test_inputs_validation():
    sym = DiscreteSpiderDistribution.from_pairs(3, [(1, 1.0, 1 / 3), (2, 1.0, 1 / 3), (3, 1.0, 1 / 3)])
    with pytest.raises(StickyMeanError):
        BoundInputs.from_distribution(sym)
    two_legs = DiscreteSpiderDistribution.from_pairs(3, [(1, 2.0, 0.5), (2, 1.0, 0.5)])
    with pytest.raises(DegenerateDistributionError):
        BoundInputs.from_distribution(two_legs)


# -- certificates -------------------------------------------------------------


def _float_oracle_scan(t: str, N: int):
    """Bound at every n in {N..N^2} using oracle moments and math.erfc."""
    m, s2, c3, _ = oracles.folded_moments(3, oracles.xt_atoms(3, t))
    m, s2, c3 = ([float(v) for v in a] for a in (m, s2, c3))
    sig = [math.sqrt(v) for v in s2]
    phi = lambda z: 0.5 * math.erfc(-z / math.sqrt(2))  # noqa: E731
    worst, worst_n = -math.inf, None
    for n in range(N, N * N + 1):
        rn = math.sqrt(n)
        p_n = sum(phi(rn * m[i] / sig[i]) for i in range(3)) + sum(c3[i] / (rn * sig[i] ** 3) for i in range(3)) * 0.4748
        p_nk = phi(rn * m[2] / sig[2]) - c3[2] / (rn * sig[2] ** 3) * 0.4748
        b = p_n + n * m[2] ** 2 / s2[2] * (1 - p_nk)
        assert p_n < 1 and p_nk >= 0 and b < 1
        if b > worst:
            worst, worst_n = b, n
    return 1 - worst, worst_n


def test_certificate_matches_float_oracle_scan():
    rho, n_star = _float_oracle_scan("0.01", 100)
    cert = certify(100, 2, BoundInputs.from_distribution(example_xt(3, 0.01)))
    assert cert.argmin_n == n_star
    assert cert.level == pytest.approx(rho, abs=1e-12)


def test_certificate_fields(xt):
    cert = certify(100, 2, xt)
    assert (cert.base, cert.scale, cert.top) == (100, 2, 10_000)
    assert cert.level == pytest.approx(1 - cert.max_bound, abs=0)
    assert cert.min_bound <= cert.max_bound
    grid = np.unique(np.linspace(100, 10_000, 300).astype(int))
    for row in bound_curve(list(grid), xt):
        assert row.bound <= 1 - cert.level


def test_certify_failure_reports_first_n():
    inp = BoundInputs.from_distribution(example_xt(3, 1.0))
    with pytest.raises(CertificationFailed) as info:
        certify(100, 2, inp)
    assert info.value.n == 100
    assert info.value.condition in CONDITIONS
    assert not (info.value.values.bound < 1)


def test_failure_condition_ordering():
    # t large enough that only the bound condition breaks at the start of the range
    inp = BoundInputs.from_distribution(example_xt(3, 0.05))
    res = scan_range(100, 2, inp)
    n, cond = res.failure
    row = bound_curve([n], inp)[0]
    assert cond == CONDITIONS[[not row.p_n < 1, not row.p_nk >= 0, not row.bound < 1].index(True)]
    if n > 100:
        prev = bound_curve([n - 1], inp)[0]
        assert prev.p_n < 1 and prev.p_nk >= 0 and prev.bound < 1


def test_scan_cap():
    inp = BoundInputs.from_distribution(example_xt(3, 0.01))
    with pytest.raises(ScanCapExceeded):
        certify(100, 6, inp)
    with pytest.raises(ScanCapExceeded):
        certify(100, 3, inp, cap=10**5)
    with pytest.raises(BoundError):
        certify(1, 2, inp)
    with pytest.raises(BoundError):
        certify(100, 1, inp)


@pytest.mark.parametrize("chunk", [1, 7, 1000, 1 << 20])
@pytest.mark.parametrize("workers", [1, 3, 8])
def test_scan_independent_of_chunking(workers, chunk):
    inp = BoundInputs.from_distribution(example_xt(3, 0.001))
    ref = scan_range(60, 2, inp, workers=1, chunk=1 << 20)
    assert scan_range(60, 2, inp, workers=workers, chunk=chunk) == ref


def test_failure_witness_independent_of_chunking():
    inp = BoundInputs.from_distribution(example_xt(3, 0.05))
    ref = scan_range(100, 2, inp, workers=1)
    for chunk in (13, 500, 4096):
        assert scan_range(100, 2, inp, workers=4, chunk=chunk) == ref


def test_vectorized_equals_scalar(xt):
    grid = [1, 2, 3, 99, 100, 12345, 10**6]
    for row in bound_curve(grid, xt):
        assert row.p_n == p_upper(row.n, xt)
        assert row.p_nk == p_lower_k(row.n, xt)
        assert row.bound == modulation_upper_bound(row.n, xt)
