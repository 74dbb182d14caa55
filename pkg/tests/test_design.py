import numpy as np
import pytest

from smcreg.design import (
    BlockLayout,
    DesignBuilder,
    PredictorSpec,
    make_basis,
)
from smcreg.errors import ConfigError, RangeError


def test_knot_positions():
    basis = make_basis(0.0, 1.0, 4)
    assert np.allclose(basis.knots, [0.2, 0.4, 0.6, 0.8])


def test_truncated_line_evaluation():
    basis = make_basis(0.0, 1.0, 3)  # knots 0.25, 0.5, 0.75
    z = basis.evaluate(0.6)
    assert np.allclose(z, [0.35, 0.1, 0.0])
    assert np.all(basis.evaluate(0.0) == 0.0)


def test_basis_validation():
    with pytest.raises(ConfigError):
        make_basis(1.0, 1.0, 3)
    with pytest.raises(ConfigError):
        make_basis(0.0, 1.0, 0)


def test_block_layout_slices():
    layout = BlockLayout(p=2, blocks=(3, 4))
    assert layout.P == 9 and layout.R == 2
    assert layout.block_slice(0) == slice(2, 5)
    assert layout.block_slice(1) == slice(5, 9)


def test_linear_only_design():
    builder = DesignBuilder([PredictorSpec("x")]).fit_ranges([])
    row = builder.design_row({"x": 0.3})
    assert np.allclose(row, [1.0, 0.3])
    assert builder.parameter_names() == ["beta0", "beta_x"]


def test_nonlinear_design_row():
    builder = DesignBuilder([PredictorSpec("x", effect="nonlinear", K=3)])
    builder.fit_ranges([{"x": 0.0}, {"x": 1.0}])
    row = builder.design_row({"x": 0.6})
    assert builder.layout.p == 2 and builder.layout.blocks == (3,)
    assert np.allclose(row, [1.0, 0.6, 0.35, 0.1, 0.0])


def test_nonlinear_rescaling_from_warm_range():
    builder = DesignBuilder([PredictorSpec("x", effect="nonlinear", K=1)])
    builder.fit_ranges([{"x": 10.0}, {"x": 20.0}])
    row = builder.design_row({"x": 15.0})
    assert row[1] == pytest.approx(0.5)


def test_out_of_range_raises():
    builder = DesignBuilder([PredictorSpec("x", effect="nonlinear", K=2)])
    builder.fit_ranges([{"x": 0.0}, {"x": 1.0}])
    with pytest.raises(RangeError):
        builder.design_row({"x": 1.5})


def test_explicit_range_overrides_warm_data():
    spec = PredictorSpec("x", effect="nonlinear", K=2, lo=0.0, hi=1.0)
    builder = DesignBuilder([spec]).fit_ranges([{"x": 0.4}, {"x": 0.6}])
    # values outside the warm stretch but inside the declared range are fine
    row = builder.design_row({"x": 0.9})
    assert row[1] == pytest.approx(0.9)


def test_group_one_hot():
    builder = DesignBuilder([PredictorSpec("g", effect="group", K=4)]).fit_ranges([])
    row = builder.design_row({"g": 2})
    assert np.allclose(row, [1.0, 0.0, 0.0, 1.0, 0.0])
    with pytest.raises(RangeError):
        builder.design_row({"g": 4})
    with pytest.raises(RangeError):
        builder.design_row({"g": 1.5})


def test_mixed_model_layout_and_names():
    builder = DesignBuilder(
        [PredictorSpec("x"), PredictorSpec("g", effect="group", K=3)]
    ).fit_ranges([])
    assert builder.layout.p == 2 and builder.layout.blocks == (3,)
    assert builder.parameter_names() == [
        "beta0", "beta_x", "u_g_0", "u_g_1", "u_g_2",
    ]
    assert builder.block_names() == ["g"]


def test_unfitted_builder_refuses_rows():
    builder = DesignBuilder([PredictorSpec("x", effect="nonlinear", K=2)])
    with pytest.raises(ConfigError):
        builder.design_row({"x": 0.5})


def test_spec_validation():
    with pytest.raises(ConfigError):
        PredictorSpec("x", effect="wiggly")
    with pytest.raises(ConfigError):
        PredictorSpec("x", effect="nonlinear", K=0)
    with pytest.raises(ConfigError):
        PredictorSpec("x", lo=0.0)
    with pytest.raises(ConfigError):
        PredictorSpec("x", effect="nonlinear", K=2, lo=1.0, hi=0.0)
