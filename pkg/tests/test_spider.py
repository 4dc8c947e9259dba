import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spiderfss.spider import (
    ORIGIN,
    EmptySampleError,
    InvalidPointError,
    SpiderPoint,
    SpiderSample,
    distance,
    fold,
    folded_sample_summary,
    frechet_function_value,
    frechet_sample_mean,
)

from oracles import exact_sample_mean, grid_minimum

P = SpiderPoint


def points(K):
    return st.one_of(
        st.just(ORIGIN),
        st.builds(P, st.integers(1, K), st.floats(1e-6, 10.0, allow_nan=False)),
    )


@st.composite
def samples(draw, max_n=20):
    K = draw(st.integers(3, 5))
    pts = draw(st.lists(points(K), min_size=1, max_size=max_n))
    return SpiderSample(K, pts)


# -- points and metric --------------------------------------------------------


def test_zero_distance_normalizes_to_origin():
    assert P(2, 0.0) == ORIGIN
    assert P(2, 0.0).is_origin
    assert P(1, 0.0) == P(3, 0.0)


@pytest.mark.parametrize("bad", [-1.0, math.nan, math.inf])
def test_invalid_positions(bad):
    with pytest.raises(InvalidPointError):
        P(1, bad)


def test_leg_out_of_range():
    with pytest.raises(InvalidPointError):
        distance(P(4, 1.0), ORIGIN, 3)
    with pytest.raises(InvalidPointError):
        P(0, 1.0)


def test_distance_examples():
    assert distance(P(2, 1.5), P(2, 0.5), 3) == 1.0
    assert distance(P(1, 1.0), P(3, 2.0), 3) == 3.0
    assert distance(ORIGIN, P(2, 0.7), 3) == 0.7


@settings(max_examples=300)
@given(st.data())
def test_metric_axioms(data):
    K = data.draw(st.integers(3, 5))
    a, b, c = (data.draw(points(K)) for _ in range(3))
    assert distance(a, b, K) == distance(b, a, K)
    assert (distance(a, b, K) == 0.0) == (a == b)
    assert distance(a, c, K) <= distance(a, b, K) + distance(b, c, K) + 1e-12


def test_fold_examples():
    assert fold(1, P(1, 2.0)) == 2.0
    assert fold(1, P(3, 2.0)) == -2.0
    assert fold(2, ORIGIN) == 0.0
    with pytest.raises(InvalidPointError):
        fold(4, P(1, 1.0), K=3)


def test_json_round_trip():
    for p in (ORIGIN, P(2, 1.25)):
        assert P.from_json(p.to_json()) == p
    assert ORIGIN.to_json() == {"origin": True}
    assert P(3, 0.5).to_json() == {"leg": 3, "x": 0.5}


# -- folded summaries ---------------------------------------------------------


def test_summary_two_points():
    s = folded_sample_summary(SpiderSample.from_pairs(3, [(1, 3.0), (2, 1.0)]))
    np.testing.assert_array_equal(s.eta, [1.0, -1.0, -2.0])
    np.testing.assert_array_equal(s.h, [1.5, 0.5, 0.0])
    assert s.n == 2


def test_summary_symmetric():
    s = folded_sample_summary(SpiderSample.from_pairs(3, [(1, 1.0), (2, 1.0), (3, 1.0)]))
    np.testing.assert_allclose(s.eta, [-1 / 3] * 3, rtol=0, atol=1e-15)


def test_empty_sample():
    with pytest.raises(EmptySampleError):
        SpiderSample(3, [])


def test_all_origin_sample():
    s = SpiderSample(4, [ORIGIN, ORIGIN])
    np.testing.assert_array_equal(folded_sample_summary(s).eta, np.zeros(4))
    assert frechet_sample_mean(s) == ORIGIN


@settings(max_examples=300)
@given(samples())
def test_summary_invariants(s):
    summ = folded_sample_summary(s)
    K = s.K
    assert np.all(summ.h >= 0)
    for k in range(K):
        other = sum(summ.h[i] for i in range(K) if i != k)
        assert summ.eta[k] == pytest.approx(summ.h[k] - other, abs=1e-12)
        assert summ.eta[k] == pytest.approx(np.mean([fold(k + 1, p) for p in s.points]), abs=1e-12)
    assert np.count_nonzero(summ.eta > 0) <= 1
    assert summ.eta.sum() == pytest.approx((2 - K) * summ.h.sum(), abs=1e-11)


# -- sample means -------------------------------------------------------------


def test_mean_examples():
    assert frechet_sample_mean(SpiderSample.from_pairs(3, [(1, 1.0), (2, 1.0), (3, 1.0)])) == ORIGIN
    assert frechet_sample_mean(SpiderSample.from_pairs(3, [(1, 3.0), (2, 1.0)])) == P(1, 1.0)
    assert frechet_sample_mean(SpiderSample.from_pairs(3, [(1, 2.0), (1, 4.0)])) == P(1, 3.0)


def test_mean_examples_against_exact_oracle():
    # frozen from exact_sample_mean
    two = [(1, Fraction(3)), (2, Fraction(1))]
    assert exact_sample_mean(3, two) == (1, Fraction(1))
    sym = [(1, Fraction(1)), (2, Fraction(1)), (3, Fraction(1))]
    assert exact_sample_mean(3, sym) == (None, Fraction(0))


def test_tie_goes_to_origin():
    s = SpiderSample.from_pairs(3, [(1, 2.0), (2, 1.0), (3, 1.0)])
    summ = folded_sample_summary(s)
    assert summ.eta[0] == 0.0
    assert frechet_sample_mean(s) == ORIGIN


def test_frechet_function_value_examples():
    s = SpiderSample.from_pairs(3, [(1, 1.0), (2, 1.0)])
    assert frechet_function_value(s, ORIGIN) == 1.0
    assert frechet_function_value(s, P(1, 1.0)) == 2.0


@settings(max_examples=200)
@given(samples())
def test_lemma_relations(s):
    eta = folded_sample_summary(s).eta
    mu = frechet_sample_mean(s)
    legs_hit = {p.leg for p in s.points if not p.is_origin}
    for k in range(1, s.K + 1):
        e, f = eta[k - 1], fold(k, mu)
        assert (e > 0) == (mu.leg == k)
        if e >= 0:
            assert f == e
        elif len(legs_hit) >= 3:
            assert e < f
        else:
            assert e <= f


@settings(max_examples=200)
@given(samples(), st.floats(0.01, 5.0))
def test_folded_mean_dominates(s, m_ref):
    """With a positive reference folded mean, folding the sample mean never moves
    it further from the reference than the folded sample mean itself."""
    eta = folded_sample_summary(s).eta
    mu = frechet_sample_mean(s)
    for k in range(1, s.K + 1):
        assert abs(fold(k, mu) - m_ref) <= abs(eta[k - 1] - m_ref)


def _random_sample(rng, K, n):
    pts = []
    for _ in range(n):
        leg = rng.randint(1, K)
        # (0, 10] on a 1e-3 lattice, so exact ties do occur; the oracle sees the float exactly
        x = Fraction(rng.randint(1, 10_000) / 1000)
        pts.append((leg, x))
    return pts


def test_oracle_equivalence_small_batch():
    rng = random.Random(1)
    for _ in range(100):
        K, n = rng.choice([3, 4, 5]), rng.randint(1, 20)
        pts = _random_sample(rng, K, n)
        sample = SpiderSample(K, [P(leg, float(x)) for leg, x in pts])
        mu = frechet_sample_mean(sample)
        leg, x = exact_sample_mean(K, pts)
        assert mu.leg == leg
        assert abs(mu.x - float(x)) <= 1e-9
        assert frechet_function_value(sample, mu) <= grid_minimum(K, pts) + 1e-12
