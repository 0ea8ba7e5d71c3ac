"""Scenario execution: allocation, accruals, trading sessions, recording.

Each step runs the same sequence: interest/dividend accrual, one tick of the
news-volatility process, intent formation for every agent (ascending id),
one call auction, recording, and a full purge of the book.

Randomness comes from three families of substreams derived from the master
seed with numpy SeedSequence keys:

    (seed, 0)     initial wealth allocation
    (seed, 1, t)  market draws for step t: interest, dividend,
                  volatility inverse rate, arrival uniform (in that order)
    (seed, 2, t)  agent decision vectors for step t (see agents.decide_step)

The stream position therefore never depends on simulation outcomes, so any
(config, seed) pair replays to an identical record.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .agents import decide_step
from .analytics import DegenerateTail, TooFewSamples, pareto_tail_fit
from .config import ScenarioConfig, validate_config, ValidationError
from .exchange import ClientBook, OrderBook, Side
from .sentiment import (GaussianSpec, VolatilityState, regime_value,
                        step_volatility)

STREAM_INIT = 0
STREAM_MARKET = 1
STREAM_DECISIONS = 2


class ConfigInvalid(Exception):
    pass


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for a named point in the stream plan."""
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence((seed,) + key)))


def equilibrium_price(total_cash: float, total_shares: int,
                      psi: float) -> float:
    """Level the price mean-reverts around: (M / S) * e^psi."""
    if total_shares <= 0:
        raise ValueError("total_shares must be positive")
    return total_cash / total_shares * math.exp(psi)


def init_clients(config: ScenarioConfig, rng) -> ClientBook:
    """Draw per-agent wealth and split it into shares and cash.

    Shares get round-half-even of the stock fraction at the initial price;
    the residual stays in cash so total initial wealth is exact (clamped at
    zero in the rare case rounding overshoots the wealth draw).
    """
    if config.agents < 1:
        raise ConfigInvalid("empty population")
    if not config.initial_price > 0:
        raise ConfigInvalid(f"initial_price={config.initial_price}")
    wealth = config.allocation.draw(rng, config.agents)
    shares = np.rint(config.stock_fraction * wealth
                     / config.initial_price).astype(np.int64)
    cash = np.maximum(0.0, wealth - shares * config.initial_price)
    return ClientBook(cash, shares)


def apply_accruals(clients: ClientBook, r_t: float, d_t: float,
                   p_prev: float) -> None:
    """cash <- (1 + r) cash + d * P_prev * shares; shares untouched."""
    clients.cash *= 1.0 + r_t
    if d_t != 0.0:
        clients.cash += d_t * p_prev * clients.shares


@dataclass(slots=True)
class MarketState:
    t: int
    last_price: float
    clients: ClientBook
    book: OrderBook
    vol_state: VolatilityState
    total_shares: int


@dataclass(slots=True)
class StepResult:
    price: float
    volume: int
    breaking: bool
    cross_type: str
    cash_total: float
    shares_total: int
    accrual_residual: float  # |dM - (r M + d P S)| / M over the whole step


@dataclass(slots=True)
class SimulationRecord:
    """Everything a run leaves behind for reporting."""

    config: ScenarioConfig
    prices: np.ndarray
    volumes: np.ndarray
    breaking: np.ndarray
    cash_totals: np.ndarray
    accrual_residuals: np.ndarray
    shares_totals: np.ndarray
    wealth_times: np.ndarray        # cadence steps
    group_wealth: np.ndarray        # (len(wealth_times), n_groups)
    pareto_times: np.ndarray        # cadence steps where the fit succeeded
    pareto_a: np.ndarray
    pareto_r2: np.ndarray
    pareto_k: np.ndarray
    initial_wealth: np.ndarray
    final_wealth: np.ndarray
    initial_cash_total: float
    initial_shares_total: int


def _group_params(config: ScenarioConfig, t: int, n: int,
                  offsets: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mu = np.empty(n)
    sd = np.empty(n)
    for i, group in enumerate(config.groups):
        g_mu, g_sd = regime_value(group.sentiment, t)
        mu[offsets[i]:offsets[i + 1]] = g_mu
        sd[offsets[i]:offsets[i + 1]] = g_sd
    return mu, sd


def run_step(state: MarketState, config: ScenarioConfig,
             offsets: np.ndarray | None = None) -> StepResult:
    """Advance the market by one trading session."""
    if offsets is None:
        offsets = np.concatenate(
            ([0], np.cumsum([g.size for g in config.groups])))
    t = state.t
    clients = state.clients
    cash_before = clients.total_cash()
    p_prev = state.last_price

    market_rng = substream(config.seed, STREAM_MARKET, t)
    r_mu, r_sd = regime_value(config.interest, t)
    d_mu, d_sd = regime_value(config.dividend, t)
    r_t = max(0.0, market_rng.normal(r_mu, r_sd))
    d_t = max(0.0, market_rng.normal(d_mu, d_sd))
    apply_accruals(clients, r_t, d_t, p_prev)

    state.vol_state, sigma_spec = step_volatility(
        config.volatility, state.vol_state, market_rng)

    psi_mu, psi_sd = _group_params(config, t, config.agents, offsets)
    rho_mu, rho_sd = regime_value(config.participation, t)
    decisions = decide_step(
        psi_mu, psi_sd, sigma_spec, GaussianSpec(rho_mu, rho_sd),
        clients.cash, clients.shares, p_prev,
        substream(config.seed, STREAM_DECISIONS, t))

    book = state.book
    is_buy = decisions.is_buy
    prices = decisions.limit_price
    sizes = decisions.size
    for i in np.flatnonzero(decisions.active):
        book.submit(clients, int(i),
                    Side.BUY if is_buy[i] else Side.SELL,
                    float(prices[i]), int(sizes[i]))

    result = book.clear(clients)
    if result.crossed:
        state.last_price = result.p_star

    cash_after = clients.total_cash()
    expected = r_t * cash_before + d_t * p_prev * state.total_shares
    residual = abs((cash_after - cash_before) - expected) / cash_before \
        if cash_before > 0 else 0.0

    book.purge(clients)
    state.t = t + 1
    return StepResult(
        price=state.last_price,
        volume=result.v_star,
        breaking=state.vol_state.regime == "breaking",
        cross_type=result.cross_type.value,
        cash_total=cash_after,
        shares_total=clients.total_shares(),
        accrual_residual=residual,
    )


def run_scenario(config: ScenarioConfig) -> SimulationRecord:
    """Execute all steps of a scenario and collect the record."""
    try:
        validate_config(config)
    except ValidationError as exc:
        raise ConfigInvalid(str(exc)) from exc

    clients = init_clients(config, substream(config.seed, STREAM_INIT))
    n, t_end = config.agents, config.steps
    group_sizes = np.array([g.size for g in config.groups])
    offsets = np.concatenate(([0], np.cumsum(group_sizes)))
    group_index = config.group_index()

    state = MarketState(
        t=0,
        last_price=config.initial_price,
        clients=clients,
        book=OrderBook(),
        vol_state=VolatilityState(),
        total_shares=clients.total_shares(),
    )

    initial_wealth = clients.wealth(config.initial_price).copy()
    initial_cash_total = clients.total_cash()

    prices = np.empty(t_end)
    volumes = np.zeros(t_end, dtype=np.int64)
    breaking = np.zeros(t_end, dtype=bool)
    cash_totals = np.empty(t_end)
    residuals = np.empty(t_end)
    shares_totals = np.empty(t_end, dtype=np.int64)
    wealth_times: list[int] = []
    group_totals: list[np.ndarray] = []
    pareto_rows: list[tuple[int, float, float, int]] = []

    for t in range(t_end):
        step = run_step(state, config, offsets)
        prices[t] = step.price
        volumes[t] = step.volume
        breaking[t] = step.breaking
        cash_totals[t] = step.cash_total
        residuals[t] = step.accrual_residual
        shares_totals[t] = step.shares_total

        if t % config.record_every == 0 or t == t_end - 1:
            wealth = clients.wealth(state.last_price)
            wealth_times.append(t)
            group_totals.append(np.bincount(group_index, weights=wealth,
                                            minlength=len(config.groups)))
            try:
                fit = pareto_tail_fit(wealth, config.tail_fraction)
                pareto_rows.append((t, fit.a, fit.r_squared, fit.k))
            except (DegenerateTail, TooFewSamples, ValueError):
                pass

    final_wealth = clients.wealth(state.last_price).copy()
    return SimulationRecord(
        config=config,
        prices=prices,
        volumes=volumes,
        breaking=breaking,
        cash_totals=cash_totals,
        accrual_residuals=residuals,
        shares_totals=shares_totals,
        wealth_times=np.array(wealth_times, dtype=np.int64),
        group_wealth=(np.vstack(group_totals) if group_totals
                      else np.empty((0, len(config.groups)))),
        pareto_times=np.array([r[0] for r in pareto_rows], dtype=np.int64),
        pareto_a=np.array([r[1] for r in pareto_rows]),
        pareto_r2=np.array([r[2] for r in pareto_rows]),
        pareto_k=np.array([r[3] for r in pareto_rows], dtype=np.int64),
        initial_wealth=initial_wealth,
        final_wealth=final_wealth,
        initial_cash_total=initial_cash_total,
        initial_shares_total=state.total_shares,
    )
