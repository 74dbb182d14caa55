"""Warm-up seeding, convergence validation and warm-up-size autotuning.

The online engines are seeded from a batch chain run on the first n_warm
observations.  A validation stretch then runs the online engine alongside
fresh batch chains on the cumulative data at evenly spaced checkpoints; a
fit is accepted when every monitored parameter's standardized mean gap
|mean_online - mean_batch| / sd_batch stays under the threshold.  On a
failing verdict the warm-up size grows multiplicatively and the whole
procedure restarts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import discrete
from .engine import ParticleSystem, normalize_weights, posterior_summary
from .errors import TuningError
from .gibbs import ChainOutput
from .rng import RandomStream


@dataclass
class WarmupPlan:
    """Sizes and tolerances of the warm-up / validation procedure."""

    n_warm: int = 1000
    n_burn: int = 1000
    threshold: float = 3.0
    growth: int = 5
    max_rounds: int = 4
    n_checkpoints: int = 5
    n_valid: int = 100
    compare_kept: int = 1000


@dataclass(frozen=True)
class CheckpointGap:
    n: int
    param: str
    online_mean: float
    online_lo: float
    online_hi: float
    batch_mean: float
    batch_lo: float
    batch_hi: float
    batch_sd: float
    gap: float


@dataclass
class ConvergenceReport:
    """Verdict of one validation stretch."""

    passed: bool
    threshold: float
    n_warm: int
    gaps: list[CheckpointGap] = field(default_factory=list)

    @property
    def worst_gap(self) -> float:
        return max((g.gap for g in self.gaps), default=0.0)

    def describe(self) -> str:
        verdict = "converged" if self.passed else "diverging"
        return (
            f"{verdict}: worst standardized gap {self.worst_gap:.3f} "
            f"(threshold {self.threshold}) over {len(self.gaps)} checks "
            f"with n_warm={self.n_warm}"
        )


def seed_particles(chain: ChainOutput, m_count: int) -> np.ndarray:
    """d x M seed matrix from the last M kept draws of a batch chain."""
    if chain.n_kept < m_count:
        raise TuningError(
            f"batch chain kept {chain.n_kept} draws but {m_count} particles "
            f"are required"
        )
    return chain.draws[-m_count:, :].T.copy()


def checkpoint_indices(n_valid: int, n_checkpoints: int) -> list[int]:
    """1-based observation counts (within the stretch) at which to compare."""
    if n_valid < 1 or n_checkpoints < 1:
        raise TuningError("validation stretch and checkpoint count must be >= 1")
    k = min(n_checkpoints, n_valid)
    return sorted({int(round(n_valid * (i + 1) / k)) for i in range(k)})


def validate_convergence(
    model,
    system: ParticleSystem,
    y_valid: np.ndarray,
    c_valid: np.ndarray,
    y_warm: np.ndarray,
    c_warm: np.ndarray,
    batch_fn: Callable[[np.ndarray, np.ndarray, RandomStream], ChainOutput],
    monitor: list[str],
    plan: WarmupPlan,
    tau: float,
    stream: RandomStream,
) -> ConvergenceReport:
    """Stream the validation rows and compare against batch chains.

    batch_fn(y, c, stream) must run the reference sampler on a full batch.
    The online engine and each checkpoint chain get independent substreams.
    Monitor entries are either parameter names or (label, weights) pairs; a
    weighted entry compares the derived scalar weights' theta — fitted values,
    contrasts — instead of a single coefficient.
    """
    y_valid = np.asarray(y_valid, dtype=float)
    c_valid = np.asarray(c_valid, dtype=float)
    checks = set(checkpoint_indices(y_valid.shape[0], plan.n_checkpoints))
    engine_stream = stream.substream(0)
    report = ConvergenceReport(passed=True, threshold=plan.threshold, n_warm=plan.n_warm)
    plain = [item for item in monitor if isinstance(item, str)]
    for i in range(y_valid.shape[0]):
        model.ingest(system, float(y_valid[i]), c_valid[i], tau, engine_stream)
        if (i + 1) not in checks:
            continue
        summary = posterior_summary(system, names=plain) if plain else {}
        probs = normalize_weights(system.logw)
        y_all = np.concatenate([y_warm, y_valid[: i + 1]])
        c_all = np.vstack([c_warm, c_valid[: i + 1]])
        chain = batch_fn(y_all, c_all, stream.substream(i + 1))
        for item in monitor:
            if isinstance(item, str):
                param = item
                draws = chain.column(param)
                online = summary[param]
            else:
                param, w = item
                w = np.asarray(w, dtype=float)
                draws = chain.draws[:, : w.size] @ w
                dist = discrete.DiscreteDistribution(
                    atoms=w @ system.theta[: w.size, :], probs=probs
                )
                online = {
                    "mean": discrete.mean(dist),
                    "lo": discrete.quantile(dist, 0.025),
                    "hi": discrete.quantile(dist, 0.975),
                }
            batch_mean = float(draws.mean())
            batch_sd = float(draws.std(ddof=1))
            if batch_sd <= 0:
                raise TuningError(f"degenerate batch draws for parameter {param!r}")
            batch_lo, batch_hi = np.percentile(draws, [2.5, 97.5])
            gap = abs(online["mean"] - batch_mean) / batch_sd
            report.gaps.append(
                CheckpointGap(
                    n=int(y_all.shape[0]),
                    param=param,
                    online_mean=online["mean"],
                    online_lo=online["lo"],
                    online_hi=online["hi"],
                    batch_mean=batch_mean,
                    batch_lo=float(batch_lo),
                    batch_hi=float(batch_hi),
                    batch_sd=batch_sd,
                    gap=gap,
                )
            )
            if gap > plan.threshold:
                report.passed = False
    return report


def autotune(
    y: np.ndarray,
    c: np.ndarray,
    make_model: Callable[[], object],
    seed_fn: Callable[[object, np.ndarray, np.ndarray, int, RandomStream], ParticleSystem],
    batch_fn: Callable[[np.ndarray, np.ndarray, RandomStream], ChainOutput],
    monitor: list[str],
    m_count: int,
    plan: WarmupPlan,
    tau: float,
    stream: RandomStream,
):
    """Grow n_warm by the plan's factor until a validation stretch converges.

    seed_fn(model, y_warm, c_warm, m_count, stream) must run the batch
    warm-up chain, fold the warm rows into the model state, and return the
    seeded particle system.  Returns (model, system, report, n_warm); raises
    TuningError with the last report attached when every round diverges or
    the data run out.
    """
    y = np.asarray(y, dtype=float)
    c = np.asarray(c, dtype=float)
    n_warm = plan.n_warm
    last_report = None
    for round_idx in range(plan.max_rounds):
        if n_warm + plan.n_valid > y.shape[0]:
            raise TuningError(
                f"warm-up size {n_warm} plus validation stretch {plan.n_valid} "
                f"exceeds the {y.shape[0]} available observations",
                report=last_report,
            )
        round_plan = WarmupPlan(**{**plan.__dict__, "n_warm": n_warm})
        round_stream = stream.substream(round_idx)
        model = make_model()
        system = seed_fn(model, y[:n_warm], c[:n_warm], m_count, round_stream.substream(0))
        report = validate_convergence(
            model,
            system,
            y[n_warm : n_warm + plan.n_valid],
            c[n_warm : n_warm + plan.n_valid],
            y[:n_warm],
            c[:n_warm],
            batch_fn,
            monitor,
            round_plan,
            tau,
            round_stream.substream(1),
        )
        if report.passed:
            return model, system, report, n_warm
        last_report = report
        n_warm *= plan.growth
    raise TuningError(
        f"no converging warm-up size found after {plan.max_rounds} rounds "
        f"(last tried {n_warm // plan.growth}); {last_report.describe()}",
        report=last_report,
    )
