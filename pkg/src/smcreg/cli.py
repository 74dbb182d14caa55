"""Command-line surface.

Subcommands: simulate, tune, fit-stream, batch-mcmc, compare.  Exit codes:
0 success, 1 unclassified error, 2 configuration error, 3 ingest error,
4 tuning failure, 5 numerical corruption.
"""

from __future__ import annotations

import argparse
import os
import sys
from contextlib import contextmanager

from . import runner
from .config import RunConfig, load_config
from .errors import (
    ConditioningError,
    ConfigError,
    CorruptedStateError,
    DecompositionError,
    IngestError,
    SmcregError,
    TuningError,
)
from .simulate import SCENARIOS

ENV_SEED = "STREAMREG_SEED"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smcreg",
        description="Streaming Bayesian semiparametric regression",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="write a synthetic scenario as CSV")
    sim.add_argument("scenario", choices=sorted(SCENARIOS))
    sim.add_argument("-n", type=int, required=True, help="number of records")
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--output", default=None)

    def add_run_flags(p, resume=False):
        p.add_argument("--config", required=True, help="YAML run configuration")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--input", default=None, help="CSV path or - for stdin")
        p.add_argument("--output", default=None)
        p.add_argument("--checkpoint", default=None)
        p.add_argument("--snapshot-every", type=int, default=None)
        p.add_argument("--particles", type=int, default=None)
        p.add_argument("--tau", type=float, default=None)
        p.add_argument("--upsilon", type=float, default=None)
        p.add_argument("--no-adapt", action="store_true")
        if resume:
            p.add_argument("--resume", action="store_true")

    fit = sub.add_parser("fit-stream", help="warm up, then fit record-at-a-time")
    add_run_flags(fit, resume=True)

    tune = sub.add_parser("tune", help="autotune the warm-up sample size")
    add_run_flags(tune)

    batch = sub.add_parser("batch-mcmc", help="batch sampler over the whole input")
    add_run_flags(batch)
    batch.add_argument("--burn", type=int, default=None)
    batch.add_argument("--kept", type=int, default=None)

    cmp_ = sub.add_parser("compare", help="score a run against a batch reference")
    cmp_.add_argument("--snapshots", required=True)
    cmp_.add_argument("--batch", required=True)
    cmp_.add_argument("--checkpoint", default=None)
    cmp_.add_argument("--output", default=None)

    return parser


def resolve_seed(cli_seed, config_seed):
    if cli_seed is not None:
        return int(cli_seed)
    if config_seed is not None:
        return int(config_seed)
    env = os.environ.get(ENV_SEED)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"{ENV_SEED}={env!r} is not an integer") from None
    return None


def apply_overrides(config: RunConfig, args) -> RunConfig:
    updates: dict = {}
    updates["seed"] = resolve_seed(args.seed, config.seed)
    smc = config.smc.model_dump()
    if args.particles is not None:
        smc["M"] = args.particles
        if config.smc.tau is None:
            smc["tau"] = None  # keep the 2/M default tracking the new M
    if args.tau is not None:
        smc["tau"] = args.tau
    if args.upsilon is not None:
        smc["upsilon"] = args.upsilon
    if args.no_adapt:
        smc["adapt"] = False
    updates["smc"] = type(config.smc).model_validate(smc)
    io = config.io.model_dump()
    if args.input is not None:
        io["input"] = args.input
    if args.output is not None:
        io["output"] = args.output
    if args.checkpoint is not None:
        io["checkpoint"] = args.checkpoint
    if args.snapshot_every is not None:
        io["snapshot_every"] = args.snapshot_every
    updates["io"] = type(config.io).model_validate(io)
    return config.model_copy(update=updates)


@contextmanager
def open_output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def dispatch(args) -> int:
    if args.command == "simulate":
        seed = resolve_seed(args.seed, None)
        if seed is None:
            raise ConfigError(
                f"simulate needs a seed (--seed or {ENV_SEED})"
            )
        with open_output(args.output) as out:
            return runner.run_simulate(args.scenario, args.n, seed, out)

    if args.command == "compare":
        with open_output(args.output) as out:
            return runner.run_compare(
                args.snapshots, args.batch, out, args.checkpoint
            )

    config = apply_overrides(load_config(args.config), args)
    out_path = config.io.output
    if args.command == "fit-stream":
        with open_output(out_path) as out:
            return runner.run_stream(config, out, resume=args.resume)
    if args.command == "tune":
        with open_output(out_path) as out:
            return runner.run_tune(config, out)
    if args.command == "batch-mcmc":
        if config.seed is None:
            raise ConfigError(
                f"a seed is required (config key, --seed, or {ENV_SEED})"
            )
        with open_output(out_path) as out:
            return runner.run_batch_mcmc(config, out, args.burn, args.kept)
    raise ConfigError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return dispatch(args)
    except ConfigError as exc:
        print(f"smcreg: configuration error: {exc}", file=sys.stderr)
        return runner.EXIT_CONFIG
    except IngestError as exc:
        where = f" (line {exc.line_number})" if exc.line_number is not None else ""
        print(f"smcreg: ingest error{where}: {exc}", file=sys.stderr)
        return runner.EXIT_INGEST
    except TuningError as exc:
        print(f"smcreg: tuning failure: {exc}", file=sys.stderr)
        return runner.EXIT_TUNING
    except (CorruptedStateError, ConditioningError, DecompositionError) as exc:
        print(f"smcreg: numerical corruption: {exc}", file=sys.stderr)
        return runner.EXIT_NUMERIC
    except SmcregError as exc:
        print(f"smcreg: error: {exc}", file=sys.stderr)
        return runner.EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
