import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smcreg.errors import DimensionError, SimplexError
from smcreg.resample import (
    check_simplex,
    resample_columns,
    should_resample,
    systematic_indices,
    systematic_resample,
)
from smcreg.rng import RandomStream


def test_worked_example_gather():
    theta = np.arange(1, 16).reshape(5, 3).T.astype(float)
    assert np.array_equal(theta[:, 0], [1, 2, 3])
    # 1-based index vector (3, 3, 5, 2, 2)
    out = resample_columns(theta, np.array([3, 3, 5, 2, 2]) - 1)
    expected = np.array(
        [
            [7.0, 7.0, 13.0, 4.0, 4.0],
            [8.0, 8.0, 14.0, 5.0, 5.0],
            [9.0, 9.0, 15.0, 6.0, 6.0],
        ]
    )
    assert np.array_equal(out, expected)


def test_worked_example_through_quantile_path():
    # weights placing copies {2 on col 2, 2 on col 3, 1 on col 5} (1-based)
    p = np.array([0.0, 0.4, 0.4, 0.0, 0.2])
    idx = systematic_indices(p, 0.5)
    assert sorted(idx.tolist()) == [1, 1, 2, 2, 4]
    theta = np.arange(1, 16).reshape(5, 3).T.astype(float)
    out = systematic_resample(theta, p, 0.5)
    assert out.shape == theta.shape
    assert set(map(tuple, out.T)) == {(4.0, 5.0, 6.0), (7.0, 8.0, 9.0), (13.0, 14.0, 15.0)}


def test_indices_are_quantiles():
    # index m is the smallest k with M*cumsum(p)[k] >= u + m
    p = np.array([0.3, 0.3, 0.4])
    u = 0.25
    w2 = p.size * np.cumsum(p)
    for m, k in enumerate(systematic_indices(p, u)):
        target = u + m
        assert w2[k] >= target
        if k > 0:
            assert w2[k - 1] < target


@given(
    st.integers(2, 64),
    st.floats(0.01, 0.99),
    st.integers(0, 2**32 - 1),
)
@settings(max_examples=300, deadline=None)
def test_copy_count_property(m_count, u, seed):
    rng = np.random.default_rng(seed)
    p = rng.random(m_count)
    p /= p.sum()
    idx = systematic_indices(p, u)
    counts = np.bincount(idx, minlength=m_count)
    lo = np.floor(m_count * p)
    hi = np.ceil(m_count * p)
    assert np.all(counts >= lo) and np.all(counts <= hi)


def test_degenerate_weight_gets_all_copies():
    p = np.zeros(6)
    p[3] = 1.0
    assert np.all(systematic_indices(p, 0.7) == 3)


def test_uniform_weights_identity_permutation():
    p = np.full(8, 1.0 / 8.0)
    assert np.array_equal(systematic_indices(p, 0.5), np.arange(8))


def test_check_simplex_rejects():
    with pytest.raises(SimplexError):
        check_simplex(np.array([0.5, 0.6]))
    with pytest.raises(SimplexError):
        check_simplex(np.array([-0.1, 1.1]))
    with pytest.raises(SimplexError):
        systematic_indices(np.array([0.5, 0.5]), 1.5)


def test_resample_shape_checks():
    with pytest.raises(DimensionError):
        systematic_resample(np.zeros((2, 3)), np.array([0.5, 0.5]), 0.5)
    with pytest.raises(DimensionError):
        resample_columns(np.zeros((2, 3)), np.array([0, 1, 5]))


def test_should_resample_threshold():
    p = np.full(10, 0.1)
    assert should_resample(p, 2.0 / 10.0) is False  # p'p = 0.1 exactly, not >
    assert should_resample(np.array([0.9] + [0.1 / 9] * 9), 0.2) is True


def test_draw_wrapper_deterministic():
    theta = np.random.default_rng(0).standard_normal((3, 10))
    p = np.full(10, 0.1)
    from smcreg.resample import systematic_resample_draw

    a = systematic_resample_draw(theta, p, RandomStream(4))
    b = systematic_resample_draw(theta, p, RandomStream(4))
    assert np.array_equal(a, b)
