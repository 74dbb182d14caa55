"""Design-row construction: fixed-effect columns, spline and indicator blocks.

Non-linear predictor effects use the truncated-line basis z_k(x) = (x - k_k)+
with equally spaced interior knots on the unit interval; the predictor is
linearly mapped to [0, 1] using its warm-up range.  Grouping predictors get
one indicator column per level.  Each random-effect block r of size K_r gets
its own variance parameter, giving the ridge-penalized block structure
blockdiag(sigma2_u1 I_K1, ..., sigma2_uR I_KR).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError, RangeError

EFFECTS = ("linear", "nonlinear", "group")


@dataclass(frozen=True)
class PredictorSpec:
    """One predictor column; nonlinear predictors may declare an explicit
    basis range (lo, hi), otherwise it is frozen from the warm-up data."""

    name: str
    effect: str = "linear"
    K: int = 0
    lo: float | None = None
    hi: float | None = None

    def __post_init__(self):
        if self.effect not in EFFECTS:
            raise ConfigError(f"unknown effect {self.effect!r} for predictor {self.name!r}")
        if self.effect in ("nonlinear", "group") and self.K < 1:
            raise ConfigError(f"predictor {self.name!r} ({self.effect}) needs K >= 1")
        if (self.lo is None) != (self.hi is None):
            raise ConfigError(
                f"predictor {self.name!r} must declare both ends of its range or neither"
            )
        if self.lo is not None and not self.lo < self.hi:
            raise ConfigError(
                f"predictor {self.name!r} has an invalid range ({self.lo}, {self.hi})"
            )


@dataclass(frozen=True)
class SplineBasis:
    """Truncated-line basis with K knots equally spaced inside (lo, hi)."""

    knots: np.ndarray
    lo: float
    hi: float
    degree: int = 1

    def evaluate(self, x01: float) -> np.ndarray:
        return np.maximum(x01 - self.knots, 0.0)


def make_basis(x_lo: float, x_hi: float, K: int, degree: int = 1) -> SplineBasis:
    """K interior knots at k/(K+1) positions of (x_lo, x_hi), degree-1 basis."""
    if not x_lo < x_hi:
        raise ConfigError(f"invalid predictor range ({x_lo}, {x_hi})")
    if K < 1:
        raise ConfigError(f"spline basis needs K >= 1, got {K}")
    knots = np.arange(1, K + 1) / (K + 1)
    return SplineBasis(knots=knots, lo=float(x_lo), hi=float(x_hi), degree=degree)


@dataclass(frozen=True)
class BlockLayout:
    """Fixed-effect count p and random-effect block sizes K_1..K_R."""

    p: int
    blocks: tuple[int, ...] = ()

    @property
    def P(self) -> int:
        return self.p + sum(self.blocks)

    @property
    def R(self) -> int:
        return len(self.blocks)

    def block_slice(self, r: int) -> slice:
        start = self.p + sum(self.blocks[:r])
        return slice(start, start + self.blocks[r])


class DesignBuilder:
    """Maps raw predictor records to P x 1 design rows for a model spec.

    Column order: intercept, one linear column per linear/nonlinear predictor
    (in spec order), then one block per nonlinear/group predictor (in spec
    order).  Bases for nonlinear predictors are frozen on the warm-up range.
    """

    def __init__(self, predictors: list[PredictorSpec]):
        self.predictors = list(predictors)
        self._bases: dict[str, SplineBasis] = {}
        self._group_sizes: dict[str, int] = {}
        fixed = 1
        blocks = []
        for spec in self.predictors:
            if spec.effect in ("linear", "nonlinear"):
                fixed += 1
            if spec.effect in ("nonlinear", "group"):
                blocks.append(spec.K)
            if spec.effect == "group":
                self._group_sizes[spec.name] = spec.K
        self.layout = BlockLayout(p=fixed, blocks=tuple(blocks))

    @property
    def is_fitted(self) -> bool:
        return all(
            spec.name in self._bases
            for spec in self.predictors
            if spec.effect == "nonlinear"
        )

    def fit_ranges(self, warm_records: list[dict]):
        """Freeze spline bases on the warm-up min/max of each nonlinear predictor."""
        for spec in self.predictors:
            if spec.effect != "nonlinear":
                continue
            if spec.lo is not None:
                lo, hi = spec.lo, spec.hi
            else:
                values = np.asarray([float(rec[spec.name]) for rec in warm_records])
                lo, hi = float(values.min()), float(values.max())
                if not lo < hi:
                    raise ConfigError(
                        f"warm-up values of predictor {spec.name!r} are degenerate"
                    )
            self._bases[spec.name] = make_basis(lo, hi, spec.K)
        return self

    def _unit_scale(self, spec: PredictorSpec, x: float) -> float:
        basis = self._bases[spec.name]
        x01 = (x - basis.lo) / (basis.hi - basis.lo)
        if not 0.0 <= x01 <= 1.0:
            raise RangeError(
                f"predictor {spec.name!r} value {x} is outside the warm-up range "
                f"({basis.lo}, {basis.hi})"
            )
        return x01

    def design_row(self, record: dict) -> np.ndarray:
        if not self.is_fitted:
            raise ConfigError("design builder must see warm-up data before building rows")
        fixed = [1.0]
        block_cols: list[np.ndarray] = []
        scaled: dict[str, float] = {}
        for spec in self.predictors:
            if spec.effect == "linear":
                fixed.append(float(record[spec.name]))
            elif spec.effect == "nonlinear":
                x01 = self._unit_scale(spec, float(record[spec.name]))
                scaled[spec.name] = x01
                fixed.append(x01)
        for spec in self.predictors:
            if spec.effect == "nonlinear":
                block_cols.append(self._bases[spec.name].evaluate(scaled[spec.name]))
            elif spec.effect == "group":
                level = float(record[spec.name])
                if level != int(level) or not 0 <= int(level) < spec.K:
                    raise RangeError(
                        f"group predictor {spec.name!r} value {level} is not a level "
                        f"index in [0, {spec.K})"
                    )
                col = np.zeros(spec.K)
                col[int(level)] = 1.0
                block_cols.append(col)
        row = np.concatenate([np.asarray(fixed)] + block_cols) if block_cols else np.asarray(fixed)
        if row.shape != (self.layout.P,):
            raise DimensionError(
                f"design row has length {row.shape[0]}, expected {self.layout.P}"
            )
        return row

    def parameter_names(self) -> list[str]:
        """Names for the P coefficient rows, in design-column order."""
        names = ["beta0"]
        for spec in self.predictors:
            if spec.effect in ("linear", "nonlinear"):
                names.append(f"beta_{spec.name}")
        for spec in self.predictors:
            if spec.effect == "nonlinear":
                names.extend(f"u_{spec.name}_{k + 1}" for k in range(spec.K))
            elif spec.effect == "group":
                names.extend(f"u_{spec.name}_{k}" for k in range(spec.K))
        return names

    def block_names(self) -> list[str]:
        return [s.name for s in self.predictors if s.effect in ("nonlinear", "group")]
