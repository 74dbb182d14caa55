"""Run configuration: nested sections parsed from YAML, CLI-overridable.

Sections: model (family + predictors), hyper (coefficient prior and
Half-Cauchy scales), smc (particle count, degeneracy threshold, proposal
scale), warmup (sizes/tolerances of the seeding procedure), seed, io.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from .design import PredictorSpec
from .errors import ConfigError
from .hyper import Hyperparameters
from .warmup import WarmupPlan

FAMILY_NAMES = ("gaussian", "logistic", "poisson")


class PredictorConfig(BaseModel):
    name: str
    effect: str = "linear"
    K: int = 0
    lo: float | None = None
    hi: float | None = None

    def to_spec(self) -> PredictorSpec:
        return PredictorSpec(
            name=self.name, effect=self.effect, K=self.K, lo=self.lo, hi=self.hi
        )


class ModelConfig(BaseModel):
    family: str = "gaussian"
    response: str = "y"
    predictors: list[PredictorConfig] = Field(default_factory=list)

    @field_validator("family")
    @classmethod
    def _known_family(cls, v):
        if v not in FAMILY_NAMES:
            raise ValueError(f"family must be one of {FAMILY_NAMES}, got {v!r}")
        return v

    @model_validator(mode="after")
    def _has_predictor(self):
        if not self.predictors:
            raise ValueError("at least one predictor is required")
        names = [p.name for p in self.predictors]
        if len(set(names)) != len(names) or self.response in names:
            raise ValueError("predictor names must be unique and differ from response")
        return self


class HyperConfig(BaseModel):
    mu_beta: float | list[float] = 0.0
    sigma_beta: float | list[float] = 1e10
    s_eps: float = 1e5
    s_u: float | list[float] = 1e5

    def build(self, p: int, n_blocks: int) -> Hyperparameters:
        mu = np.asarray(self.mu_beta, dtype=float)
        if mu.ndim == 0:
            mu = np.full(p, float(mu))
        if mu.shape != (p,):
            raise ConfigError(f"mu_beta has length {mu.size}, model has {p} fixed effects")
        sigma = np.asarray(self.sigma_beta, dtype=float)
        if sigma.ndim == 1 and sigma.shape != (p,):
            raise ConfigError(
                f"sigma_beta diagonal has length {sigma.size}, model has {p} fixed effects"
            )
        s_u = self.s_u
        if isinstance(s_u, (int, float)):
            s_u = [float(s_u)] * n_blocks
        if len(s_u) != n_blocks:
            raise ConfigError(
                f"{len(s_u)} block scales supplied for {n_blocks} random-effect blocks"
            )
        return Hyperparameters(
            mu_beta=mu,
            sigma_beta=sigma if sigma.ndim else float(sigma),
            s_eps=self.s_eps,
            s_u=tuple(s_u),
        )


class SmcConfig(BaseModel):
    M: int = 1000
    tau: float | None = None  # defaults to 2/M
    upsilon: float = 1.0
    adapt: bool = True

    @model_validator(mode="after")
    def _bounds(self):
        if self.M < 2:
            raise ValueError(f"particle count must be >= 2, got {self.M}")
        if self.tau is not None and not 0.0 < self.tau <= 1.0:
            raise ValueError(f"tau must lie in (0, 1], got {self.tau}")
        if self.upsilon <= 0:
            raise ValueError(f"upsilon must be positive, got {self.upsilon}")
        return self

    @property
    def tau_value(self) -> float:
        return self.tau if self.tau is not None else 2.0 / self.M


class WarmupConfig(BaseModel):
    n_warm: int = 1000
    n_burn: int = 1000
    threshold: float = 3.0
    growth: int = 5
    max_rounds: int = 4
    n_checkpoints: int = 5
    n_valid: int = 100
    compare_kept: int = 1000

    def to_plan(self) -> WarmupPlan:
        return WarmupPlan(**self.model_dump())


class IoConfig(BaseModel):
    input: str = "-"
    output: str | None = None
    checkpoint: str | None = None
    snapshot_every: int = 1

    @field_validator("snapshot_every")
    @classmethod
    def _positive(cls, v):
        if v < 1:
            raise ValueError(f"snapshot_every must be >= 1, got {v}")
        return v


class RunConfig(BaseModel):
    model: ModelConfig
    hyper: HyperConfig = Field(default_factory=HyperConfig)
    smc: SmcConfig = Field(default_factory=SmcConfig)
    warmup: WarmupConfig = Field(default_factory=WarmupConfig)
    seed: int | None = None
    io: IoConfig = Field(default_factory=IoConfig)


def _normalize_keys(data: dict) -> dict:
    """Accept the s_sigma2 / s_ur spellings as aliases in the hyper section."""
    hyper = data.get("hyper")
    if isinstance(hyper, dict):
        if "s_sigma2" in hyper and "s_eps" not in hyper:
            hyper["s_eps"] = hyper.pop("s_sigma2")
        if "s_ur" in hyper and "s_u" not in hyper:
            hyper["s_u"] = hyper.pop("s_ur")
    return data


def parse_config(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("run configuration must be a mapping of sections")
    try:
        return RunConfig.model_validate(_normalize_keys(dict(data)))
    except ValidationError as exc:
        raise ConfigError(f"invalid run configuration: {exc}") from exc


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from exc
    return parse_config(data if data is not None else {})
