"""Quartile sampler bounds, shape and determinism."""
import numpy as np
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from profiles.dataset import QuartileDistribution
from profiles.sampling import sample

DIST = QuartileDistribution(min=0, q1=10, q2=20, q3=40, max=100)


def _draws(dist, seed, size):
    rng = np.random.default_rng(seed)
    return np.array([sample(dist, rng) for _ in range(size)])


def _inner_quartile_cdf(dist):
    # 두 구간에 각각 확률 1/2 를 균등하게 나눈 조각별 선형 CDF
    return lambda x: np.interp(x, [dist.q1, dist.q2, dist.q3], [0.0, 0.5, 1.0])


def test_degenerate_interval():
    dist = QuartileDistribution(min=5, q1=5, q2=5, q3=5, max=5)
    assert sample(dist, np.random.default_rng(0)) == 5


def test_bounds_and_balance():
    draws = _draws(DIST, 2, 20_000)
    assert draws.min() >= 10 and draws.max() <= 40
    assert abs((draws < 20).mean() - 0.5) <= 0.02


def test_matches_piecewise_uniform_cdf():
    draws = _draws(DIST, 3, 20_000)
    result = stats.kstest(draws, _inner_quartile_cdf(DIST))
    assert result.pvalue > 1e-3


def test_plain_uniform_is_rejected():
    # [q1, q3] 균등분포는 중앙값 질량이 1/3 이라 분명히 다르다
    draws = np.random.default_rng(4).uniform(DIST.q1, DIST.q3, 20_000)
    assert stats.kstest(draws, _inner_quartile_cdf(DIST)).pvalue < 1e-6


def test_same_seed_same_sequence():
    first = [sample(DIST, np.random.default_rng(7)) for _ in range(3)]
    again = [sample(DIST, np.random.default_rng(7)) for _ in range(3)]
    assert first == again


@given(
    st.floats(0.1, 1e6),
    st.floats(0.0, 1.0),
    st.floats(0.0, 1.0),
    st.integers(0, 2**32 - 1),
)
def test_draw_within_inner_quartiles(q1, a, b, seed):
    q2 = q1 * (1 + a)
    q3 = q2 * (1 + b)
    dist = QuartileDistribution(min=q1, q1=q1, q2=q2, q3=q3, max=q3)
    value = sample(dist, np.random.default_rng(seed))
    assert q1 <= value <= q3
