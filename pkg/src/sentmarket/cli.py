"""Command line interface.

    sentmarket run --scenario sec5-pareto --seed 7 --out results/
    sentmarket run --config my_scenario.json --out results/ --no-figures
    sentmarket analyze --run results/ --out results/
    sentmarket list-scenarios

`run` executes one or more scenarios (several run concurrently with
--jobs) and writes prices.csv, wealth.csv, pareto.csv, summary.csv, a
manifest, and the report figures into the output directory.  `analyze`
recomputes statistics from a previous run's CSV set.

Exit codes: 0 success, 1 configuration/input error, 2 runtime/data failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import os
import sys
import time

from .config import ParseError, ScenarioConfig, ValidationError, parse_config
from .report import MalformedCsv, MissingInput, write_report, write_run_outputs
from .scenarios import SCENARIO_NAMES, UnknownScenario, builtin_scenario
from .simulation import ConfigInvalid, run_scenario


@dataclasses.dataclass(frozen=True)
class RunJob:
    config: ScenarioConfig
    outdir: str
    figures: bool


def _execute_job(job: RunJob) -> str:
    start = time.perf_counter()
    record = run_scenario(job.config)
    write_run_outputs(record, job.outdir, time.perf_counter() - start)
    if job.figures:
        from .figures import render_run_figures
        render_run_figures(record, job.outdir)
    return (f"{job.config.name}: {job.config.steps} steps, "
            f"{time.perf_counter() - start:.1f}s -> {job.outdir}")


def _load_configs(args) -> list[ScenarioConfig]:
    configs = []
    for name in args.scenario or []:
        configs.append(builtin_scenario(name, steps=args.steps,
                                        seed=args.seed))
    for path in args.config or []:
        with open(path) as fh:
            config = parse_config(fh.read())
        if args.steps is not None or args.seed is not None:
            raise ValidationError(
                "--steps/--seed overrides apply to built-in scenarios only; "
                "edit the config file instead")
        configs.append(config)
    if not configs:
        raise ValidationError("nothing to run: pass --scenario or --config")
    return configs


def _cmd_run(args) -> int:
    try:
        configs = _load_configs(args)
    except UnknownScenario as exc:
        print(f"error: unknown scenario {exc.args[0]!r}; "
              f"see `sentmarket list-scenarios`", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ParseError, ValidationError, ConfigInvalid) as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return 1

    single = len(configs) == 1
    jobs = [RunJob(config,
                   args.out if single else os.path.join(args.out, config.name),
                   not args.no_figures)
            for config in configs]
    try:
        if len(jobs) > 1 and args.jobs > 1:
            with concurrent.futures.ProcessPoolExecutor(
                    max_workers=args.jobs) as pool:
                for line in pool.map(_execute_job, jobs):
                    print(line)
        else:
            for job in jobs:
                print(_execute_job(job))
    except (ValidationError, ConfigInvalid) as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failure
        print(f"error: run failed: {exc}", file=sys.stderr)
        return 2
    return 0


def _cmd_analyze(args) -> int:
    try:
        path = write_report(args.run, args.out)
    except MissingInput as exc:
        print(f"error: missing input: {exc}", file=sys.stderr)
        return 1
    except MalformedCsv as exc:
        print(f"error: malformed input: {exc}", file=sys.stderr)
        return 2
    print(f"report -> {path}")
    if not args.no_figures:
        from .figures import render_qq_from_prices
        from .report import load_prices
        table = load_prices(os.path.join(args.run, "prices.csv"))
        fig_path = render_qq_from_prices(
            table.price, f"QQ of log returns ({args.run})",
            args.out or args.run)
        if fig_path:
            print(f"figure -> {fig_path}")
    return 0


def _cmd_list(_args) -> int:
    for name in SCENARIO_NAMES:
        print(name)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sentmarket",
        description="sentiment-driven artificial stock market")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute scenarios and write CSV/figures")
    run.add_argument("--scenario", action="append",
                     help="built-in scenario name (repeatable)")
    run.add_argument("--config", action="append",
                     help="scenario config file (repeatable)")
    run.add_argument("--seed", type=int, default=None,
                     help="override the master seed of built-in scenarios")
    run.add_argument("--steps", type=int, default=None,
                     help="override the step count of built-in scenarios")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--jobs", type=int, default=1,
                     help="run this many scenarios concurrently")
    run.add_argument("--no-figures", action="store_true",
                     help="skip figure rendering")
    run.set_defaults(func=_cmd_run)

    analyze = sub.add_parser("analyze",
                             help="recompute statistics from a run's CSVs")
    analyze.add_argument("--run", required=True,
                         help="directory holding prices.csv (and pareto.csv)")
    analyze.add_argument("--out", default=None,
                         help="where to write report.csv (default: run dir)")
    analyze.add_argument("--no-figures", action="store_true",
                         help="skip figure rendering")
    analyze.set_defaults(func=_cmd_analyze)

    lst = sub.add_parser("list-scenarios", help="print built-in scenarios")
    lst.set_defaults(func=_cmd_list)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
