import numpy as np
import pytest

from smcreg.errors import ConditioningError, DimensionError
from smcreg.linalg import (
    SpectralDecomposition,
    add_outer,
    quad_form,
    require_positive_definite,
    spectral_decompose,
    spectral_decompose_batch,
)


def random_spd(rng, n, scale=1.0):
    a = rng.standard_normal((n, n))
    return a @ a.T + scale * np.eye(n)


def test_decompose_reconstructs():
    rng = np.random.default_rng(0)
    m = random_spd(rng, 6)
    dec = spectral_decompose(m)
    assert np.allclose(dec.reconstruct(), m, atol=1e-10)


def test_eigenvalues_sorted_descending():
    rng = np.random.default_rng(1)
    dec = spectral_decompose(random_spd(rng, 5))
    assert np.all(np.diff(dec.values) <= 0)


def test_vectors_orthonormal():
    rng = np.random.default_rng(2)
    dec = spectral_decompose(random_spd(rng, 7))
    assert np.allclose(dec.vectors.T @ dec.vectors, np.eye(7), atol=1e-10)


def test_known_diagonal():
    dec = spectral_decompose(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(dec.values, [3.0, 2.0, 1.0])


def test_rejects_asymmetric():
    with pytest.raises(DimensionError):
        spectral_decompose(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_rejects_nonsquare():
    with pytest.raises(DimensionError):
        spectral_decompose(np.zeros((2, 3)))


def test_require_positive_definite_flags_singular():
    dec = spectral_decompose(np.diag([1.0, 0.0]))
    with pytest.raises(ConditioningError):
        require_positive_definite(dec)


def test_batch_matches_single():
    rng = np.random.default_rng(3)
    ms = np.stack([random_spd(rng, 4) for _ in range(5)])
    vectors, values = spectral_decompose_batch(ms)
    for b in range(5):
        rebuilt = (vectors[b] * values[b]) @ vectors[b].T
        assert np.allclose(rebuilt, ms[b], atol=1e-10)
    # batch eigenvalues come back ascending
    assert np.all(np.diff(values, axis=1) >= 0)


def test_batch_flags_singular_member():
    ms = np.stack([np.eye(3), np.diag([1.0, 1.0, 0.0])])
    with pytest.raises(ConditioningError):
        spectral_decompose_batch(ms)


def test_quad_form():
    m = np.array([[2.0, 1.0], [1.0, 3.0]])
    v = np.array([1.0, -1.0])
    assert quad_form(v, m) == pytest.approx(2.0 - 2.0 + 3.0)


def test_add_outer_symmetric():
    rng = np.random.default_rng(4)
    m = random_spd(rng, 3)
    v = rng.standard_normal(3)
    out = add_outer(m, v)
    assert np.array_equal(out, out.T)
    assert np.allclose(out, m + np.outer(v, v))


def test_reconstruct_roundtrip_dataclass():
    dec = SpectralDecomposition(vectors=np.eye(2), values=np.array([2.0, 1.0]))
    assert np.allclose(dec.reconstruct(), np.diag([2.0, 1.0]))
    assert dec.order == 2
