import numpy as np
import pytest

from smcreg.config import RunConfig, load_config, parse_config
from smcreg.errors import ConfigError

MINIMAL = {"model": {"predictors": [{"name": "x"}]}}


def test_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.model.family == "gaussian" and cfg.model.response == "y"
    assert cfg.smc.M == 1000
    assert cfg.smc.tau is None and cfg.smc.tau_value == pytest.approx(2.0 / 1000)
    assert cfg.smc.upsilon == 1.0 and cfg.smc.adapt
    assert cfg.warmup.n_warm == 1000 and cfg.warmup.growth == 5
    assert cfg.warmup.threshold == 3.0
    assert cfg.hyper.s_eps == 1e5 and cfg.hyper.s_u == 1e5
    assert cfg.io.input == "-" and cfg.io.snapshot_every == 1
    assert cfg.seed is None


def test_explicit_tau_wins():
    cfg = parse_config({**MINIMAL, "smc": {"M": 100, "tau": 0.5}})
    assert cfg.smc.tau_value == 0.5


def test_hyper_aliases():
    cfg = parse_config(
        {**MINIMAL, "hyper": {"s_sigma2": 7.0, "s_ur": [2.0]}}
    )
    assert cfg.hyper.s_eps == 7.0 and cfg.hyper.s_u == [2.0]


def test_hyper_build_shapes():
    cfg = parse_config(
        {**MINIMAL, "hyper": {"mu_beta": [1.0, 2.0], "sigma_beta": [4.0, 9.0], "s_u": 3.0}}
    )
    hyper = cfg.hyper.build(2, 2)
    assert np.allclose(hyper.mu_beta, [1.0, 2.0])
    assert hyper.s_u == (3.0, 3.0)


def test_hyper_build_rejects_mismatched_lengths():
    cfg = parse_config({**MINIMAL, "hyper": {"mu_beta": [1.0, 2.0, 3.0]}})
    with pytest.raises(ConfigError):
        cfg.hyper.build(2, 0)
    cfg = parse_config({**MINIMAL, "hyper": {"s_u": [1.0, 2.0]}})
    with pytest.raises(ConfigError):
        cfg.hyper.build(1, 1)


@pytest.mark.parametrize(
    "bad",
    [
        {"model": {"family": "gamma", "predictors": [{"name": "x"}]}},
        {"model": {"predictors": []}},
        {"model": {"predictors": [{"name": "x"}, {"name": "x"}]}},
        {"model": {"response": "x", "predictors": [{"name": "x"}]}},
        {**MINIMAL, "smc": {"M": 1}},
        {**MINIMAL, "smc": {"tau": 1.5}},
        {**MINIMAL, "smc": {"upsilon": 0.0}},
        {**MINIMAL, "io": {"snapshot_every": 0}},
    ],
)
def test_validation_errors(bad):
    with pytest.raises(ConfigError):
        parse_config(bad)


def test_parse_rejects_non_mapping():
    with pytest.raises(ConfigError):
        parse_config([1, 2, 3])


def test_load_yaml_roundtrip(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text(
        "model:\n"
        "  family: logistic\n"
        "  predictors:\n"
        "    - name: x\n"
        "      effect: spline\n"
        "      K: 12\n"
        "      lo: 0.0\n"
        "      hi: 1.0\n"
        "smc:\n"
        "  M: 250\n"
        "seed: 42\n"
    )
    cfg = load_config(path)
    assert isinstance(cfg, RunConfig)
    assert cfg.model.family == "logistic"
    assert cfg.model.predictors[0].K == 12
    assert cfg.model.predictors[0].lo == 0.0
    assert cfg.smc.M == 250 and cfg.smc.tau_value == pytest.approx(2.0 / 250)
    assert cfg.seed == 42


def test_load_missing_file_and_bad_yaml(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.yaml")
    bad = tmp_path / "bad.yaml"
    bad.write_text("model: [unclosed\n")
    with pytest.raises(ConfigError):
        load_config(bad)
