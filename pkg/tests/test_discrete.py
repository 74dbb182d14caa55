import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smcreg import discrete
from smcreg.discrete import (
    DiscreteDistribution,
    credible_interval,
    fp_bin_width,
    frequency_polygon,
    mean,
    quantile,
    variance,
)
from smcreg.errors import SmcregError

# three-atom reference distribution used throughout
REF = DiscreteDistribution(
    atoms=np.array([5.0, 11.0, 13.0]),
    probs=np.array([2.0 / 7.0, 4.0 / 7.0, 1.0 / 7.0]),
)


def test_reference_median():
    assert quantile(REF, 0.5) == 11.0


def test_reference_mean():
    assert mean(REF) == pytest.approx(67.0 / 7.0, abs=1e-14)


def test_reference_interval():
    assert credible_interval(REF, 0.95) == (5.0, 13.0)


def test_quantile_step_boundaries():
    # F(5) = 2/7 exactly: q at the boundary still returns 5
    assert quantile(REF, 2.0 / 7.0) == 5.0
    assert quantile(REF, 2.0 / 7.0 + 1e-12) == 11.0
    assert quantile(REF, 1.0) == 13.0
    assert quantile(REF, 0.0) == 5.0


def test_quantile_ignores_zero_mass_atom_at_zero():
    d = DiscreteDistribution(
        atoms=np.array([1.0, 2.0, 3.0]), probs=np.array([0.0, 0.5, 0.5])
    )
    assert quantile(d, 0.0) == 2.0


def test_variance_known():
    d = DiscreteDistribution(atoms=np.array([0.0, 1.0]), probs=np.array([0.5, 0.5]))
    assert variance(d) == pytest.approx(0.25)


def test_validation():
    with pytest.raises(SmcregError):
        DiscreteDistribution(atoms=np.array([1.0]), probs=np.array([0.5]))
    with pytest.raises(SmcregError):
        DiscreteDistribution(atoms=np.array([1.0, 2.0]), probs=np.array([1.5, -0.5]))
    with pytest.raises(SmcregError):
        quantile(REF, 1.5)


@given(
    st.lists(st.floats(-50, 50), min_size=1, max_size=30),
    st.floats(0.001, 0.999),
)
@settings(max_examples=200, deadline=None)
def test_quantile_is_generalized_inverse(atoms, q):
    atoms = np.asarray(atoms)
    probs = np.full(atoms.size, 1.0 / atoms.size)
    d = DiscreteDistribution(atoms=atoms, probs=probs)
    x = quantile(d, q)
    cdf = lambda t: probs[atoms <= t].sum()
    assert cdf(x) >= q - 1e-12
    # no smaller atom reaches q
    smaller = atoms[atoms < x]
    if smaller.size:
        assert cdf(smaller.max()) < q + 1e-12


def test_interval_ordering():
    lo, hi = credible_interval(REF, 0.5)
    assert lo <= hi


def test_frequency_polygon_masses():
    poly = frequency_polygon(REF, h=4.0, origin=4.0)
    # bins [4,8): mass 2/7; [8,12): 4/7; [12,16): 1/7, padded by empty bins
    assert poly.heights[0] == 0.0 and poly.heights[-1] == 0.0
    assert np.allclose(poly.heights[1:-1] * 4.0, [2.0 / 7.0, 4.0 / 7.0, 1.0 / 7.0])
    # heights integrate to one over the bins
    assert np.sum(poly.heights) * 4.0 == pytest.approx(1.0)
    # midpoints sit at bin centers, spaced by h
    assert np.allclose(np.diff(poly.midpoints), 4.0)
    assert poly.midpoints[1] == pytest.approx(6.0)


def test_frequency_polygon_half_open_binning():
    # an atom exactly on a bin edge belongs to the right bin
    d = DiscreteDistribution(atoms=np.array([1.0, 2.0]), probs=np.array([0.5, 0.5]))
    poly = frequency_polygon(d, h=1.0, origin=1.0)
    assert np.allclose(poly.heights[1:-1], [0.5, 0.5])


def test_fp_bin_width_scales_with_n():
    rng = np.random.default_rng(0)
    x1 = rng.standard_normal(1000)
    h1 = fp_bin_width(x1)
    h2 = fp_bin_width(np.concatenate([x1, rng.standard_normal(31000)]))
    assert h2 < h1


def test_fp_bin_width_normal_reference_value():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(10000)
    factor = (1280.0 * np.sqrt(np.pi) / 49.0) ** 0.2
    sd = np.std(x, ddof=1)
    iqr = np.subtract(*np.percentile(x, [75, 25]))
    expected = factor * 1.06 * min(sd, iqr / 1.34) * x.size ** (-0.2)
    assert fp_bin_width(x) == pytest.approx(expected, rel=1e-12)


def test_fp_bin_width_degenerate():
    with pytest.raises(SmcregError):
        fp_bin_width(np.array([2.0, 2.0, 2.0]))


def test_bandwidth_factor_value():
    # (1280 sqrt(pi) / 49)^(1/5), evaluated independently
    expected = np.exp(0.2 * (np.log(1280.0) + 0.5 * np.log(np.pi) - np.log(49.0)))
    assert discrete.FP_BANDWIDTH_FACTOR == pytest.approx(expected, rel=1e-12)
    assert discrete.FP_BANDWIDTH_FACTOR == pytest.approx(2.15336557, rel=1e-8)
