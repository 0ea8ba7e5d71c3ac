"""Per-step trading decisions.

Each agent decides, in this order: participate or sit out (Poisson activity
with its own inverse rate x), buy or sell (logistic in its tilt psi), the
limit price (folded gaussian around the last price with relative width
sigma), and the order size (uniform over what the portfolio can afford).

`form_intent` runs that pipeline for a single agent; `decide_step` is the
vectorized equivalent the simulation loop uses, drawing one fixed-layout
block of vectors per step so the random stream position never depends on
outcomes (see simulation module for the stream plan).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .exchange import Side
from .sentiment import GaussianSpec, sample_agent_params


@dataclass(frozen=True, slots=True)
class AgentProfile:
    agent_id: int
    group_id: int


@dataclass(frozen=True, slots=True)
class TradeIntent:
    side: Side
    limit_price: float
    size: int


@dataclass(frozen=True, slots=True)
class StepSnapshot:
    """The (psi, sigma, rho^-1) specs one group reads at one step."""

    psi: GaussianSpec
    sigma: GaussianSpec
    inv_rho: GaussianSpec


def participates(x_n: float, rng) -> bool:
    """True with probability 1 - exp(-x_n) (one unit time step)."""
    return rng.random() < -math.expm1(-x_n)


def choose_side(psi_n: float, rng) -> Side:
    """Buy with probability e^psi / (1 + e^psi), so p_buy/p_sell = e^psi."""
    return Side.BUY if rng.random() < expit(psi_n) else Side.SELL


def draw_limit_price(p_prev: float, sigma_n: float, rng) -> float:
    """|gaussian(p_prev, sigma_n * p_prev)|, redrawn in the null case."""
    scale = sigma_n * p_prev
    while True:
        price = abs(rng.normal(p_prev, scale))
        if price > 0.0:
            return price


def max_affordable(side: Side, cash: float, shares: int,
                   limit_price: float) -> int:
    """Largest size the portfolio supports at this limit price."""
    if side is Side.SELL:
        return int(shares)
    cap = int(cash // limit_price)
    # float division may round up across an integer boundary
    if cap >= 1 and cap * limit_price > cash:
        cap -= 1
    return cap


def draw_size(side: Side, cash: float, shares: int, limit_price: float,
              rng) -> int | None:
    """Uniform integer on [1, cap], or None when nothing is affordable."""
    cap = max_affordable(side, cash, shares, limit_price)
    if cap < 1:
        return None
    return 1 + int(rng.random() * cap)


def form_intent(profile: AgentProfile, cash: float, shares: int,
                p_prev: float, snapshot: StepSnapshot, rng) -> TradeIntent | None:
    """Full decision pipeline for one agent at one step.

    Draw order is fixed (params, participation, side, price, size) so a
    given rng stream always maps to the same intent.
    """
    psi, sigma, x = sample_agent_params(
        snapshot.psi, snapshot.sigma, snapshot.inv_rho, rng)
    if not participates(x, rng):
        return None
    side = choose_side(psi, rng)
    price = draw_limit_price(p_prev, sigma, rng)
    size = draw_size(side, cash, shares, price, rng)
    if size is None:
        return None
    return TradeIntent(side, price, size)


@dataclass(slots=True)
class StepDecisions:
    """Vectorized intents for every agent at one step (mask selects actors)."""

    active: np.ndarray       # bool, order feasible and agent participating
    is_buy: np.ndarray       # bool
    limit_price: np.ndarray  # float
    size: np.ndarray         # int, valid where active


def decide_step(psi_mu: np.ndarray, psi_sd: np.ndarray,
                sigma_spec: GaussianSpec, rho_spec: GaussianSpec,
                cash: np.ndarray, shares: np.ndarray, p_prev: float,
                rng) -> StepDecisions:
    """All agents' decisions for one step from one generator.

    Consumes exactly seven vectors of length N in a fixed order (psi, sigma,
    x, participation, side, price normal, size uniform), mirroring the
    scalar pipeline in `form_intent`.
    """
    n = len(cash)
    psi = rng.normal(psi_mu, psi_sd)
    sigma = np.maximum(1e-6, rng.normal(sigma_spec.mu, sigma_spec.sd, n))
    x = np.maximum(0.0, rng.normal(rho_spec.mu, rho_spec.sd, n))
    takes_part = rng.random(n) < -np.expm1(-x)
    is_buy = rng.random(n) < expit(psi)
    price = np.abs(rng.normal(p_prev, sigma * p_prev))
    u_size = rng.random(n)

    zero = price == 0.0
    while np.any(zero):  # measure-zero fold at the origin
        price[zero] = np.abs(rng.normal(p_prev, sigma[zero] * p_prev))
        zero = price == 0.0

    cap = np.where(is_buy,
                   np.floor_divide(cash, price).astype(np.int64),
                   shares.astype(np.int64))
    overshoot = is_buy & (cap >= 1) & (cap * price > cash)
    cap = np.where(overshoot, cap - 1, cap)

    active = takes_part & (cap >= 1)
    size = 1 + (u_size * cap).astype(np.int64)
    return StepDecisions(active=active, is_buy=is_buy,
                         limit_price=price, size=size)
