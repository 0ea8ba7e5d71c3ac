"""CSV emission and ingestion for runs and re-analysis.

Output files of a run (fixed column order, floats at 17 significant digits
so replays are byte-identical):

    prices.csv   t,price,volume,regime          one row per step
    wealth.csv   t,group_id,total               cadence rows, 1-based groups
    pareto.csv   t,a,r_squared,k                cadence rows (successful fits)
    summary.csv  one row of run-level statistics
    manifest.json  scenario, config hash, seed, outputs, timing
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .analytics import (DegenerateTail, NonPositivePrice, QQFit,
                        TooFewSamples, log_returns, normal_qq_fit,
                        pareto_tail_fit, wealth_fraction)
from .config import config_hash, serialize_config
from .simulation import SimulationRecord


class MissingInput(Exception):
    pass


class MalformedCsv(Exception):
    pass


def _f(x: float) -> str:
    return f"{x:.17g}"


SUMMARY_HEADER = ("scenario,seed,qq_mean,qq_sd,qq_r_squared,"
                  "pareto_a,pareto_r_squared,pareto_k,"
                  "max_accrual_residual,max_shares_drift")


def write_run_outputs(record: SimulationRecord, outdir: str,
                      elapsed_seconds: float = 0.0) -> dict[str, str]:
    """Write the four CSV files plus manifest; returns name -> path."""
    os.makedirs(outdir, exist_ok=True)
    paths = {}

    path = os.path.join(outdir, "prices.csv")
    with open(path, "w", newline="") as fh:
        fh.write("t,price,volume,regime\n")
        for t in range(len(record.prices)):
            fh.write(f"{t},{_f(record.prices[t])},{record.volumes[t]},"
                     f"{int(record.breaking[t])}\n")
    paths["prices"] = path

    path = os.path.join(outdir, "wealth.csv")
    with open(path, "w", newline="") as fh:
        fh.write("t,group_id,total\n")
        for i, t in enumerate(record.wealth_times):
            for g in range(record.group_wealth.shape[1]):
                fh.write(f"{t},{g + 1},{_f(record.group_wealth[i, g])}\n")
    paths["wealth"] = path

    path = os.path.join(outdir, "pareto.csv")
    with open(path, "w", newline="") as fh:
        fh.write("t,a,r_squared,k\n")
        for i, t in enumerate(record.pareto_times):
            fh.write(f"{t},{_f(record.pareto_a[i])},"
                     f"{_f(record.pareto_r2[i])},{record.pareto_k[i]}\n")
    paths["pareto"] = path

    path = os.path.join(outdir, "summary.csv")
    with open(path, "w", newline="") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        fh.write(",".join(_summary_row(record)) + "\n")
    paths["summary"] = path

    path = os.path.join(outdir, "manifest.json")
    manifest = {
        "scenario": record.config.name,
        "config_hash": config_hash(record.config),
        "seed": record.config.seed,
        "outputs": {k: os.path.basename(v) for k, v in paths.items()},
        "elapsed_seconds": elapsed_seconds,
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    paths["manifest"] = path

    path = os.path.join(outdir, "config.json")
    with open(path, "w") as fh:
        fh.write(serialize_config(record.config))
        fh.write("\n")
    paths["config"] = path
    return paths


def _summary_row(record: SimulationRecord) -> list[str]:
    qq = _try_qq(record.prices)
    fields = [record.config.name, str(record.config.seed)]
    if qq is None:
        fields += ["", "", ""]
    else:
        fields += [_f(qq.mean), _f(qq.sd), _f(qq.r_squared)]
    try:
        fit = pareto_tail_fit(record.final_wealth, record.config.tail_fraction)
        fields += [_f(fit.a), _f(fit.r_squared), str(fit.k)]
    except (DegenerateTail, TooFewSamples, ValueError):
        fields += ["", "", ""]
    max_residual = float(record.accrual_residuals.max()) \
        if len(record.accrual_residuals) else 0.0
    drift = int(np.abs(record.shares_totals
                       - record.initial_shares_total).max()) \
        if len(record.shares_totals) else 0
    fields += [_f(max_residual), str(drift)]
    return fields


def _try_qq(prices: np.ndarray) -> QQFit | None:
    try:
        return normal_qq_fit(log_returns(prices))
    except (TooFewSamples, NonPositivePrice):
        return None


# -- re-analysis --------------------------------------------------------------


@dataclass(slots=True)
class PricesTable:
    t: np.ndarray
    price: np.ndarray
    volume: np.ndarray
    regime: np.ndarray


def load_prices(path: str) -> PricesTable:
    """Read a prices.csv; raises MissingInput / MalformedCsv."""
    if not os.path.exists(path):
        raise MissingInput(f"no such file: {path}")
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    if not lines or (len(lines) == 1 and not lines[0].strip()):
        raise MissingInput(f"empty input file: {path}")
    if lines[0].strip() != "t,price,volume,regime":
        raise MalformedCsv(f"{path}: unexpected header {lines[0]!r}")
    t, price, volume, regime = [], [], [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise MalformedCsv(f"{path}:{lineno}: expected 4 fields")
        try:
            t.append(int(parts[0]))
            price.append(float(parts[1]))
            volume.append(int(parts[2]))
            regime.append(int(parts[3]))
        except ValueError as exc:
            raise MalformedCsv(f"{path}:{lineno}: {exc}") from exc
    return PricesTable(np.array(t), np.array(price), np.array(volume),
                       np.array(regime))


def load_final_pareto(path: str) -> tuple[float, float, int] | None:
    """Last (a, r_squared, k) row of a pareto.csv, if the file has one."""
    if not os.path.exists(path):
        return None
    with open(path, newline="") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if len(lines) < 2:
        return None
    if lines[0].strip() != "t,a,r_squared,k":
        raise MalformedCsv(f"{path}: unexpected header {lines[0]!r}")
    parts = lines[-1].split(",")
    if len(parts) != 4:
        raise MalformedCsv(f"{path}: expected 4 fields in {lines[-1]!r}")
    try:
        return float(parts[1]), float(parts[2]), int(parts[3])
    except ValueError as exc:
        raise MalformedCsv(f"{path}: {exc}") from exc


WEALTH_SHARE_POINTS = (0.01, 0.05, 0.2)


def write_report(run_dir: str, out_dir: str | None = None) -> str:
    """Recompute statistics from a run's CSV set into report.csv.

    Needs prices.csv; uses pareto.csv for the tail exponent when present.
    """
    out_dir = run_dir if out_dir is None else out_dir
    table = load_prices(os.path.join(run_dir, "prices.csv"))
    try:
        qq = normal_qq_fit(log_returns(table.price))
    except (TooFewSamples, NonPositivePrice) as exc:
        raise MalformedCsv(f"prices.csv not analyzable: {exc}") from exc

    rows = [
        ("n_steps", str(len(table.price))),
        ("qq_mean", _f(qq.mean)),
        ("qq_sd", _f(qq.sd)),
        ("qq_r_squared", _f(qq.r_squared)),
    ]
    final = load_final_pareto(os.path.join(run_dir, "pareto.csv"))
    if final is not None:
        a, r2, k = final
        rows += [("pareto_a", _f(a)), ("pareto_r_squared", _f(r2)),
                 ("pareto_k", str(k))]
        if a > 1.0:
            for x in WEALTH_SHARE_POINTS:
                rows.append((f"wealth_share_top_{x:g}",
                             _f(wealth_fraction(x, a))))

    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "report.csv")
    with open(path, "w", newline="") as fh:
        fh.write("metric,value\n")
        for key, value in rows:
            fh.write(f"{key},{value}\n")
    return path
