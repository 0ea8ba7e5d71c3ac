"""Statistical measurement of simulated markets.

Log returns and their normal quantile-quantile regression (mean, sd, R^2),
rank-regression fitting of the wealth tail exponent, the associated
wealth-share law, and small aggregation helpers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri


class NonPositivePrice(Exception):
    pass


class TooFewSamples(Exception):
    pass


class DegenerateTail(Exception):
    """All tail wealths equal: the rank regression has no slope."""


class ExponentOutOfRange(Exception):
    """Tail exponent <= 1 (infinite mean), wealth shares undefined."""


@dataclass(frozen=True, slots=True)
class QQFit:
    mean: float       # intercept
    sd: float         # slope
    r_squared: float


@dataclass(frozen=True, slots=True)
class ParetoFit:
    a: float          # tail exponent
    intercept: float
    k: int            # tail sample count used
    r_squared: float


@dataclass(frozen=True, slots=True)
class WealthSnapshot:
    t: int
    wealth: np.ndarray       # per-agent cash + shares * price
    group_index: np.ndarray  # 0-based group per agent


def log_returns(prices) -> np.ndarray:
    """r_t = ln(P_t / P_{t-1}); requires strictly positive prices."""
    p = np.asarray(prices, dtype=np.float64)
    if p.size < 2:
        raise TooFewSamples("need at least two prices")
    if np.any(p <= 0):
        raise NonPositivePrice("prices must be strictly positive")
    return np.diff(np.log(p))


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Least squares y = intercept + slope * x; returns (intercept, slope,
    r_squared) with R^2 the squared sample correlation."""
    xm, ym = x.mean(), y.mean()
    dx, dy = x - xm, y - ym
    sxx = float(dx @ dx)
    sxy = float(dx @ dy)
    syy = float(dy @ dy)
    slope = sxy / sxx
    intercept = ym - slope * xm
    r_squared = (sxy * sxy) / (sxx * syy) if syy > 0 else 1.0
    return intercept, slope, r_squared


def normal_qq_fit(returns) -> QQFit:
    """Regress sorted returns on standard normal quantiles.

    Quantile convention: Phi^-1((i - 0.5) / n) for i = 1..n.  The intercept
    estimates the mean, the slope the standard deviation; R^2 near one means
    the sample is close to gaussian (fat tails depress it).
    """
    r = np.sort(np.asarray(returns, dtype=np.float64))
    n = r.size
    if n < 10:
        raise TooFewSamples(f"need >= 10 returns, got {n}")
    quantiles = ndtri((np.arange(1, n + 1) - 0.5) / n)
    intercept, slope, r2 = _ols(quantiles, r)
    return QQFit(mean=intercept, sd=max(0.0, slope), r_squared=r2)


def pareto_tail_fit(wealths, tail_fraction: float = 0.25) -> ParetoFit:
    """Tail exponent from the rank-size regression.

    Sort descending, keep the richest round(tail_fraction * n), regress
    log wealth on log rank; the slope is -1/a.
    """
    w = np.asarray(wealths, dtype=np.float64)
    if not 0.0 < tail_fraction <= 1.0:
        raise ValueError("tail_fraction must be in (0, 1]")
    if w.size < 12:
        raise TooFewSamples(f"need >= 12 wealths, got {w.size}")
    if np.any(w <= 0):
        raise ValueError("wealths must be strictly positive")
    k = int(round(tail_fraction * w.size))
    if k < 3:
        raise TooFewSamples(f"tail keeps only {k} samples")
    tail = np.sort(w)[::-1][:k]
    if tail[0] == tail[-1]:
        raise DegenerateTail("all tail wealths equal")
    log_rank = np.log(np.arange(1, k + 1, dtype=np.float64))
    intercept, slope, r2 = _ols(log_rank, np.log(tail))
    return ParetoFit(a=-1.0 / slope, intercept=intercept, k=k, r_squared=r2)


def pareto_sample(w0: float, a: float, rng, n: int | None = None):
    """Inverse-CDF sampling of w0 * U^(-1/a), U uniform on (0, 1]."""
    u = 1.0 - (rng.random() if n is None else rng.random(n))
    return w0 * u ** (-1.0 / a)


def wealth_fraction(x: float, a: float) -> float:
    """Share of total wealth held by the richest fraction x: x^((a-1)/a)."""
    if not a > 1.0:
        raise ExponentOutOfRange(f"need a > 1, got {a}")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must be in [0, 1]")
    return x ** ((a - 1.0) / a)


def group_wealth(snapshot: WealthSnapshot) -> np.ndarray:
    """Total wealth per group, indexed like the config's group list."""
    return np.bincount(snapshot.group_index, weights=snapshot.wealth)


def histogram(wealths, bins: int) -> tuple[np.ndarray, np.ndarray]:
    """Counts (summing to n) and bin edges."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    counts, edges = np.histogram(np.asarray(wealths, dtype=np.float64),
                                 bins=bins)
    return counts, edges
