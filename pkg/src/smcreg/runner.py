"""Run orchestration: ingestion, warm-up, streaming, checkpoints, comparison.

Everything here is deterministic given (config, seed, input bytes): snapshot
records serialize floats at 17 significant digits, the engine random stream
is checkpointed alongside the particle system, and resumed runs continue the
exact draw sequence of an uninterrupted run.
"""

from __future__ import annotations

import csv
import pickle
import sys
import warnings
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from . import discrete
from .config import RunConfig
from .design import DesignBuilder
from .engine import ParticleSystem, normalize_weights, snapshot
from .errors import ConfigError, CorruptedStateError, IngestError, TuningError
from .family import get_family
from .gibbs import ChainOutput, gibbs_lmm, mh_gibbs_glmm
from .glm import MhConfig
from .models import GaussianStreamModel, GlmStreamModel
from .rng import RandomStream
from .warmup import WarmupPlan, seed_particles, validate_convergence

CHECKPOINT_VERSION = 1
BUFFER_SIZE_WARNING_ROWS = 100_000

# Stable exit codes (documented in the README)
EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_INGEST = 3
EXIT_TUNING = 4
EXIT_NUMERIC = 5


# -- record serialization --------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17e")
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    if isinstance(value, dict):
        inner = ", ".join(f"{_fmt(str(k))}: {_fmt(v)}" for k, v in value.items())
        return "{" + inner + "}"
    if value is None:
        return "null"
    raise ConfigError(f"cannot serialize value of type {type(value).__name__}")


def dumps_record(record: dict) -> str:
    """One self-describing record per line; floats at 17 significant digits."""
    return _fmt(record)


def loads_record(line: str) -> dict:
    import json

    return json.loads(line)


# -- ingestion -------------------------------------------------------------


def open_lines(path: str) -> Iterator[str]:
    if path == "-":
        return iter(sys.stdin)
    return iter(Path(path).read_text().splitlines())


def ingest(lines: Iterable[str], config: RunConfig) -> Iterator[dict]:
    """Parse a comma-delimited table with a header row into stream records.

    Yields dicts mapping the response and predictor names to floats; any
    failure is reported with its 1-based line number and aborts the record.
    """
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        return
    header = [h.strip() for h in header]
    needed = [config.model.response] + [p.name for p in config.model.predictors]
    missing = [name for name in needed if name not in header]
    if missing:
        raise IngestError(f"input header is missing columns {missing}", line_number=1)
    cols = {name: header.index(name) for name in needed}
    family = None
    if config.model.family != "gaussian":
        family = get_family(config.model.family)
    for line_number, row in enumerate(reader, start=2):
        if not row:
            continue
        record: dict = {}
        for name, j in cols.items():
            if j >= len(row):
                raise IngestError(
                    f"row has {len(row)} fields, column {name!r} needs index {j + 1}",
                    line_number=line_number,
                )
            try:
                record[name] = float(row[j])
            except ValueError:
                raise IngestError(
                    f"malformed number {row[j]!r} in column {name!r}",
                    line_number=line_number,
                ) from None
        if family is not None and not family.h(record[config.model.response]):
            raise IngestError(
                f"response {record[config.model.response]!r} is outside the "
                f"support of the {family.name} family",
                line_number=line_number,
            )
        yield record


# -- model construction ----------------------------------------------------


def build_model(config: RunConfig, warm_records: list[dict]):
    """Design builder (range-fitted on the warm records) plus a stream model."""
    builder = DesignBuilder([p.to_spec() for p in config.model.predictors])
    builder.fit_ranges(warm_records)
    blocks = builder.layout
    hyper = config.hyper.build(blocks.p, blocks.R)
    names = builder.parameter_names()
    if config.model.family == "gaussian":
        from .gaussian import GaussianLayout

        model = GaussianStreamModel(GaussianLayout(blocks), hyper, names)
    else:
        from .glm import GlmLayout

        model = GlmStreamModel(
            GlmLayout(blocks),
            get_family(config.model.family),
            hyper,
            MhConfig(upsilon=config.smc.upsilon, adapt=config.smc.adapt),
            names,
        )
    return builder, model


def design_matrix(builder: DesignBuilder, config: RunConfig, records: list[dict]):
    y = np.asarray([rec[config.model.response] for rec in records])
    c = np.stack([builder.design_row(rec) for rec in records]) if records else (
        np.zeros((0, builder.layout.P))
    )
    return y, c


def warm_seed(model, y_warm, c_warm, m_count: int, n_burn: int, stream: RandomStream) -> ParticleSystem:
    """Run the batch warm-up chain, fold warm data in, seed the particles."""
    if isinstance(model, GaussianStreamModel):
        chain = gibbs_lmm(
            y_warm, c_warm, model.layout.blocks, model.hyper, n_burn, m_count,
            stream, coef_names=list(model.names[: model.layout.P]),
        )
    else:
        chain = mh_gibbs_glmm(
            y_warm, c_warm, model.layout.blocks, model.family, model.hyper,
            model.mh, n_burn, m_count, stream,
            coef_names=list(model.names[: model.layout.P]),
        )
    model.absorb_warm_data(y_warm, c_warm)
    return model.seed_system(seed_particles(chain, m_count))


def batch_chain(config: RunConfig, builder: DesignBuilder, y, c, stream: RandomStream,
                n_burn: int | None = None, n_kept: int | None = None) -> ChainOutput:
    """Reference batch sampler on a full design matrix."""
    blocks = builder.layout
    hyper = config.hyper.build(blocks.p, blocks.R)
    names = builder.parameter_names()
    burn = n_burn if n_burn is not None else config.warmup.n_burn
    kept = n_kept if n_kept is not None else config.warmup.compare_kept
    if config.model.family == "gaussian":
        return gibbs_lmm(y, c, blocks, hyper, burn, kept, stream, coef_names=names)
    family = get_family(config.model.family)
    cfg = MhConfig(upsilon=config.smc.upsilon, adapt=config.smc.adapt)
    return mh_gibbs_glmm(y, c, blocks, family, hyper, cfg, burn, kept, stream,
                         coef_names=names)


# -- checkpointing ---------------------------------------------------------


def write_checkpoint(path: str, config: RunConfig, builder, model,
                     system: ParticleSystem, stream: RandomStream, n_total: int):
    if isinstance(model, GlmStreamModel) and model.buffer.n > BUFFER_SIZE_WARNING_ROWS:
        warnings.warn(
            f"checkpoint embeds a {model.buffer.n}-row data buffer", stacklevel=2
        )
    payload = {
        "version": CHECKPOINT_VERSION,
        "kind": "smcreg-checkpoint",
        "config": config.model_dump(),
        "builder": builder,
        "model": model,
        "system": system,
        "stream_state": stream.get_state(),
        "n_total": n_total,
    }
    with open(path, "wb") as fh:
        pickle.dump(payload, fh)


def read_checkpoint(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            payload = pickle.load(fh)
    except (OSError, pickle.UnpicklingError) as exc:
        raise CorruptedStateError(f"cannot read checkpoint {path}: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("kind") != "smcreg-checkpoint":
        raise CorruptedStateError(f"{path} is not a run checkpoint")
    if payload.get("version") != CHECKPOINT_VERSION:
        raise CorruptedStateError(
            f"checkpoint version {payload.get('version')} is not supported"
        )
    return payload


# -- subcommand bodies -----------------------------------------------------


def run_stream(config: RunConfig, out=None, resume: bool = False) -> int:
    """Warm-up (unless resuming) then the per-record cycle; emits snapshots."""
    out = out if out is not None else sys.stdout
    records = ingest(open_lines(config.io.input), config)
    tau = config.smc.tau_value

    if resume:
        if not config.io.checkpoint:
            raise ConfigError("resume requested but no checkpoint path configured")
        payload = read_checkpoint(config.io.checkpoint)
        builder = payload["builder"]
        model = payload["model"]
        system = payload["system"]
        stream = RandomStream.from_state(payload["stream_state"])
        n_total = int(payload["n_total"])
        for _ in range(n_total):
            try:
                next(records)
            except StopIteration:
                raise IngestError(
                    f"input ended before the checkpointed position n={n_total}"
                ) from None
    else:
        if config.seed is None:
            raise ConfigError("a seed is required (config key, --seed, or STREAMREG_SEED)")
        warm_records = []
        n_warm = config.warmup.n_warm
        for rec in records:
            warm_records.append(rec)
            if len(warm_records) == n_warm:
                break
        if len(warm_records) < n_warm:
            raise IngestError(
                f"input ended after {len(warm_records)} records during the "
                f"{n_warm}-record warm-up"
            )
        builder, model = build_model(config, warm_records)
        y_warm, c_warm = design_matrix(builder, config, warm_records)
        root = RandomStream(config.seed)
        system = warm_seed(
            model, y_warm, c_warm, config.smc.M, config.warmup.n_burn,
            root.substream(1),
        )
        system.n_seen = n_warm
        stream = root.substream(2)
        n_total = n_warm

    streamed = 0
    for rec in records:
        row = builder.design_row(rec)
        model.ingest(system, rec[config.model.response], row, tau, stream)
        system.n_seen = n_total + streamed + 1
        streamed += 1
        if streamed % config.io.snapshot_every == 0:
            out.write(dumps_record(snapshot(system)) + "\n")
    n_total += streamed

    if config.io.checkpoint:
        write_checkpoint(
            config.io.checkpoint, config, builder, model, system, stream, n_total
        )
    return EXIT_OK


def emit_report(report, n_warm: int, out):
    """Write a convergence report as checkpoint records plus a verdict line."""
    for gap in report.gaps:
        out.write(
            dumps_record(
                {
                    "record": "checkpoint",
                    "n": gap.n,
                    "parameter": gap.param,
                    "smc_mean": gap.online_mean,
                    "smc_lo": gap.online_lo,
                    "smc_hi": gap.online_hi,
                    "mcmc_mean": gap.batch_mean,
                    "mcmc_lo": gap.batch_lo,
                    "mcmc_hi": gap.batch_hi,
                    "gap": gap.gap,
                }
            )
            + "\n"
        )
    out.write(
        dumps_record(
            {
                "record": "verdict",
                "verdict": "converging" if report.passed else "diverging",
                "max_gap": report.worst_gap,
                "threshold": report.threshold,
                "n_warm": n_warm,
            }
        )
        + "\n"
    )


def tune_monitor(config: RunConfig, builder: DesignBuilder, warm_records: list[dict]):
    """Convergence statistics for the validation stretch.

    Plain fixed effects for linear models.  When the model has nonlinear
    terms, the slope coefficients of spline-expanded predictors are confounded
    with their penalized blocks, so the fitted linear predictor at five
    representative warm covariate points is monitored instead — the quantity
    the comparison is really about.
    """
    nonlinear = [p for p in config.model.predictors if p.effect == "nonlinear"]
    if not nonlinear:
        return builder.parameter_names()[: builder.layout.p]
    key = nonlinear[0].name
    ordered = sorted(warm_records, key=lambda rec: rec[key])
    picks = [ordered[round(q * (len(ordered) - 1))] for q in (0.1, 0.3, 0.5, 0.7, 0.9)]
    return [
        (f"eta@{key}={rec[key]:.3f}", builder.design_row(rec)) for rec in picks
    ]


def run_tune(config: RunConfig, out=None) -> int:
    """Grow the warm-up size until a validation stretch converges; emit one
    record per checkpoint comparison plus a final verdict record."""
    out = out if out is not None else sys.stdout
    if config.seed is None:
        raise ConfigError("a seed is required (config key, --seed, or STREAMREG_SEED)")
    all_records = list(ingest(open_lines(config.io.input), config))
    if not all_records:
        raise IngestError("tuning needs a nonempty input")
    plan = config.warmup.to_plan()
    root = RandomStream(config.seed)
    tau = config.smc.tau_value

    n_warm = plan.n_warm
    last_report = None
    for round_idx in range(plan.max_rounds):
        if n_warm + plan.n_valid > len(all_records):
            if last_report is not None:
                emit_report(last_report, n_warm // plan.growth, out)
            raise TuningError(
                f"warm-up size {n_warm} plus validation stretch {plan.n_valid} "
                f"exceeds the {len(all_records)} available records",
                report=last_report,
            )
        round_stream = root.substream(round_idx)
        builder, model = build_model(config, all_records[:n_warm])
        y_warm, c_warm = design_matrix(builder, config, all_records[:n_warm])
        system = warm_seed(
            model, y_warm, c_warm, config.smc.M, plan.n_burn,
            round_stream.substream(0),
        )
        system.n_seen = n_warm
        valid = all_records[n_warm : n_warm + plan.n_valid]
        y_valid, c_valid = design_matrix(builder, config, valid)
        monitor = tune_monitor(config, builder, all_records[:n_warm])
        round_plan = WarmupPlan(**{**plan.__dict__, "n_warm": n_warm})
        report = validate_convergence(
            model, system, y_valid, c_valid, y_warm, c_warm,
            lambda y, c, s: batch_chain(config, builder, y, c, s),
            monitor, round_plan, tau, round_stream.substream(1),
        )
        if report.passed:
            emit_report(report, n_warm, out)
            return EXIT_OK
        last_report = report
        n_warm *= plan.growth
    emit_report(last_report, n_warm // plan.growth, out)
    raise TuningError(
        f"no converging warm-up size found after {plan.max_rounds} rounds",
        report=last_report,
    )


def run_batch_mcmc(config: RunConfig, out=None, n_burn: int | None = None,
                   n_kept: int | None = None) -> int:
    """Batch sampler over the whole input; kept draws as a CSV table."""
    out = out if out is not None else sys.stdout
    if config.seed is None:
        raise ConfigError("a seed is required (config key, --seed, or STREAMREG_SEED)")
    all_records = list(ingest(open_lines(config.io.input), config))
    if not all_records:
        raise IngestError("batch sampling needs a nonempty input")
    builder = DesignBuilder([p.to_spec() for p in config.model.predictors])
    builder.fit_ranges(all_records)
    y, c = design_matrix(builder, config, all_records)
    chain = batch_chain(
        config, builder, y, c, RandomStream(config.seed), n_burn, n_kept
    )
    out.write(",".join(chain.names) + "\n")
    for row in chain.draws:
        out.write(",".join(format(v, ".17e") for v in row) + "\n")
    return EXIT_OK


def standardized_gaps(snapshot_params: dict, batch_draws: dict) -> list[dict]:
    """Per-parameter |snapshot mean - batch mean| / batch SD over the shared
    parameter names; errors when nothing matches."""
    shared = [name for name in snapshot_params if name in batch_draws]
    if not shared:
        raise ConfigError(
            "no shared parameter names between the snapshots and the batch table"
        )
    rows = []
    for name in shared:
        draws = np.asarray(batch_draws[name], dtype=float)
        sd = float(draws.std(ddof=1))
        if sd <= 0:
            raise ConfigError(f"degenerate batch draws for parameter {name!r}")
        mean_snap = float(snapshot_params[name]["mean"])
        mean_batch = float(draws.mean())
        rows.append(
            {
                "record": "gap",
                "parameter": name,
                "snapshot_mean": mean_snap,
                "batch_mean": mean_batch,
                "batch_sd": sd,
                "gap": abs(mean_snap - mean_batch) / sd,
            }
        )
    return rows


def read_batch_table(path: str) -> dict:
    lines = list(open_lines(path))
    if not lines:
        raise IngestError("batch table is empty")
    names = [h.strip() for h in lines[0].split(",")]
    data = np.asarray(
        [[float(v) for v in line.split(",")] for line in lines[1:] if line.strip()]
    )
    if data.ndim != 2 or data.shape[1] != len(names):
        raise IngestError("batch table rows do not match its header")
    return {name: data[:, j] for j, name in enumerate(names)}


def run_compare(snapshots_path: str, batch_path: str,
                out=None, checkpoint_path: str | None = None) -> int:
    """Standardized gaps from the final snapshot vs a batch draw table, plus
    paired frequency-polygon tables (shared bin width) when particle atoms
    are available from a checkpoint."""
    out = out if out is not None else sys.stdout
    snap_lines = [ln for ln in open_lines(snapshots_path) if ln.strip()]
    if not snap_lines:
        raise IngestError("snapshot stream is empty")
    final = loads_record(snap_lines[-1])
    batch_draws = read_batch_table(batch_path)
    for row in standardized_gaps(final["params"], batch_draws):
        row["n"] = final["n"]
        out.write(dumps_record(row) + "\n")

    if checkpoint_path:
        payload = read_checkpoint(checkpoint_path)
        system: ParticleSystem = payload["system"]
        p = normalize_weights(system.logw)
        for name in final["params"]:
            if name not in batch_draws:
                continue
            draws = np.asarray(batch_draws[name], dtype=float)
            h = discrete.fp_bin_width(draws)
            atoms = system.theta[system.row_index(name), :]
            origin = float(min(atoms.min(), draws.min())) - 0.5 * h
            for source, dist in (
                ("online", discrete.DiscreteDistribution(atoms=atoms, probs=p)),
                (
                    "batch",
                    discrete.DiscreteDistribution(
                        atoms=draws, probs=np.full(draws.size, 1.0 / draws.size)
                    ),
                ),
            ):
                poly = discrete.frequency_polygon(dist, h, origin=origin)
                out.write(
                    dumps_record(
                        {
                            "record": "polygon",
                            "parameter": name,
                            "source": source,
                            "bin_width": poly.bin_width,
                            "midpoint": list(poly.midpoints),
                            "height": list(poly.heights),
                        }
                    )
                    + "\n"
                )
    return EXIT_OK


def run_simulate(scenario: str, n: int, seed: int, out=None) -> int:
    """Write a simulated scenario as a CSV table."""
    from .simulate import simulate

    out = out if out is not None else sys.stdout
    records, _ = simulate(scenario, n, RandomStream(seed))
    names = list(records[0].keys())
    out.write(",".join(names) + "\n")
    for rec in records:
        out.write(
            ",".join(
                str(rec[k]) if isinstance(rec[k], int) else format(rec[k], ".17e")
                for k in names
            )
            + "\n"
        )
    return EXIT_OK
