"""Figure rendering for run reports.

Renders the standard views of a run next to its CSV output: price/volume
series, normal QQ plot of log returns, tail-exponent evolution, initial and
final wealth histograms, and (multi-group runs) group wealth trajectories.
"""

from __future__ import annotations

import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from scipy.special import ndtri  # noqa: E402

from .analytics import NonPositivePrice, TooFewSamples, log_returns, normal_qq_fit
from .simulation import SimulationRecord

_GROUP_COLORS = ("tab:red", "tab:blue", "tab:green", "tab:olive",
                 "tab:purple", "tab:cyan")


def _save(fig, outdir: str, name: str) -> str:
    path = os.path.join(outdir, name)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def price_figure(record: SimulationRecord, outdir: str) -> str:
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(record.prices, lw=0.8, color="tab:blue", label="price")
    ax.set_xlabel("step")
    ax.set_ylabel("price")
    ax2 = ax.twinx()
    ax2.bar(np.arange(len(record.volumes)), record.volumes,
            width=1.0, alpha=0.25, color="gray", label="volume")
    ax2.set_ylabel("executed volume")
    ax.set_title(f"{record.config.name}: price and volume")
    fig.tight_layout()
    return _save(fig, outdir, "price.png")


def qq_figure(record: SimulationRecord, outdir: str) -> str | None:
    try:
        returns = log_returns(record.prices)
        fit = normal_qq_fit(returns)
    except (TooFewSamples, NonPositivePrice):
        return None
    r = np.sort(returns)
    q = ndtri((np.arange(1, len(r) + 1) - 0.5) / len(r))
    fig, ax = plt.subplots(figsize=(5.5, 5.5))
    ax.plot(q, r, ".", ms=2, color="tab:blue")
    ax.plot(q, fit.mean + fit.sd * q, "-", color="tab:red",
            label=f"sd={fit.sd:.4f}, $R^2$={fit.r_squared:.3f}")
    ax.set_xlabel("standard normal quantiles")
    ax.set_ylabel("log return quantiles")
    ax.set_title(f"{record.config.name}: QQ of log returns")
    ax.legend()
    fig.tight_layout()
    return _save(fig, outdir, "qq.png")


def pareto_figure(record: SimulationRecord, outdir: str) -> str | None:
    if len(record.pareto_times) == 0:
        return None
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(record.pareto_times, record.pareto_a, lw=0.9, color="tab:blue")
    ax.set_xlabel("step")
    ax.set_ylabel("tail exponent a")
    ax.set_title(f"{record.config.name}: wealth tail exponent "
                 f"(richest {record.config.tail_fraction:.0%})")
    fig.tight_layout()
    return _save(fig, outdir, "pareto.png")


def wealth_histogram_figure(record: SimulationRecord, outdir: str) -> str:
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    for ax, data, label in ((axes[0], record.initial_wealth, "initial"),
                            (axes[1], record.final_wealth, "final")):
        ax.hist(data, bins=50, color="tab:blue")
        ax.set_xlabel("wealth")
        ax.set_ylabel("agents")
        ax.set_title(f"{label} wealth")
    fig.suptitle(record.config.name)
    fig.tight_layout()
    return _save(fig, outdir, "wealth_hist.png")


def group_wealth_figure(record: SimulationRecord, outdir: str) -> str | None:
    if record.group_wealth.shape[1] < 2 or len(record.wealth_times) == 0:
        return None
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for g in range(record.group_wealth.shape[1]):
        ax.plot(record.wealth_times, np.log(record.group_wealth[:, g]),
                lw=1.0, color=_GROUP_COLORS[g % len(_GROUP_COLORS)],
                label=f"group {g + 1}")
    ax.set_xlabel("step")
    ax.set_ylabel("log total wealth")
    ax.set_title(f"{record.config.name}: group wealth")
    ax.legend()
    fig.tight_layout()
    return _save(fig, outdir, "group_wealth.png")


def render_run_figures(record: SimulationRecord, outdir: str) -> list[str]:
    """Render every applicable figure; returns the written paths."""
    os.makedirs(outdir, exist_ok=True)
    paths = [
        price_figure(record, outdir),
        qq_figure(record, outdir),
        pareto_figure(record, outdir),
        wealth_histogram_figure(record, outdir),
        group_wealth_figure(record, outdir),
    ]
    return [p for p in paths if p is not None]


def render_qq_from_prices(prices: np.ndarray, title: str,
                          outdir: str) -> str | None:
    """QQ figure for the re-analysis path (prices loaded from CSV)."""
    try:
        returns = log_returns(prices)
        fit = normal_qq_fit(returns)
    except (TooFewSamples, NonPositivePrice):
        return None
    r = np.sort(returns)
    q = ndtri((np.arange(1, len(r) + 1) - 0.5) / len(r))
    fig, ax = plt.subplots(figsize=(5.5, 5.5))
    ax.plot(q, r, ".", ms=2, color="tab:blue")
    ax.plot(q, fit.mean + fit.sd * q, "-", color="tab:red",
            label=f"sd={fit.sd:.4f}, $R^2$={fit.r_squared:.3f}")
    ax.set_xlabel("standard normal quantiles")
    ax.set_ylabel("log return quantiles")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    os.makedirs(outdir, exist_ok=True)
    return _save(fig, outdir, "qq.png")
