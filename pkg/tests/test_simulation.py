import math

import numpy as np
import pytest

from sentmarket.config import (GroupSpec, IdenticalAllocation,
                               ParetoAllocation, ScenarioConfig,
                               UniformAllocation)
from sentmarket.exchange import ClientBook
from sentmarket.scenarios import BREAKING, CALM
from sentmarket.sentiment import (GaussianSpec, JumpVolatilitySpec,
                                  VolatilityState, constant_schedule)
from sentmarket.simulation import (ConfigInvalid, MarketState, OrderBook,
                                   apply_accruals, equilibrium_price,
                                   init_clients, run_scenario, run_step,
                                   substream)


def make_config(steps=100, agents=50, psi=0.0, rho=0.1, seed=1,
                allocation=None, interest=0.0, dividend=0.0,
                stock_fraction=0.5, record_every=50):
    span = max(steps, 1)  # schedules need at least one step even when T=0
    return ScenarioConfig(
        name="test",
        agents=agents,
        steps=steps,
        initial_price=100.0,
        allocation=allocation or IdenticalAllocation(2e6, 0.0),
        stock_fraction=stock_fraction,
        interest=constant_schedule(span, interest),
        dividend=constant_schedule(span, dividend),
        participation=constant_schedule(span, rho, 0.01),
        groups=(GroupSpec(agents, constant_schedule(span, psi, 0.0)),),
        volatility=JumpVolatilitySpec(
            calm=CALM, breaking=BREAKING,
            arrival_inverse_rate=GaussianSpec(0.0, 0.0)),
        seed=seed,
        record_every=record_every,
        tail_fraction=0.25,
    )


class TestInitClients:
    def test_identical_split_half_stock_half_cash(self):
        config = make_config(agents=10)
        clients = init_clients(config, substream(1, 0))
        np.testing.assert_array_equal(clients.shares, 10_000)
        np.testing.assert_allclose(clients.cash, 1e6)

    def test_all_cash_when_stock_fraction_zero(self):
        config = make_config(agents=10, stock_fraction=0.0)
        clients = init_clients(config, substream(1, 0))
        np.testing.assert_array_equal(clients.shares, 0)
        np.testing.assert_allclose(clients.cash, 2e6)

    def test_pareto_draw_floor_is_w0(self):
        class FakeRng:
            def random(self, n=None):
                return np.zeros(n)  # U = 1 - 0 -> distribution minimum

        config = make_config(agents=5, allocation=ParetoAllocation(1e5, 1.5))
        clients = init_clients(config, FakeRng())
        wealth = clients.cash + clients.shares * config.initial_price
        np.testing.assert_allclose(wealth, 1e5)

    def test_wealth_preserved_by_rounding(self):
        config = make_config(agents=2000, allocation=UniformAllocation(0, 1e6))
        clients = init_clients(config, substream(3, 0))
        drawn = config.allocation.draw(substream(3, 0), 2000)
        wealth = clients.cash + clients.shares * config.initial_price
        # residual cash keeps wealth exact unless rounding overshoots w
        overshoot = clients.shares * config.initial_price > drawn
        np.testing.assert_allclose(wealth[~overshoot], drawn[~overshoot])
        assert np.all(clients.cash >= 0)
        assert np.all(clients.shares >= 0)

    def test_invalid_configs(self):
        with pytest.raises(ConfigInvalid):
            init_clients(make_config(agents=0), substream(1, 0))
        bad = make_config()
        object.__setattr__(bad, "initial_price", 0.0)
        with pytest.raises(ConfigInvalid):
            init_clients(bad, substream(1, 0))


class TestAccruals:
    def test_closed_system_unchanged(self):
        clients = ClientBook([100.0, 250.0], [10, 0])
        apply_accruals(clients, 0.0, 0.0, 50.0)
        np.testing.assert_array_equal(clients.cash, [100.0, 250.0])

    def test_interest_plus_dividend(self):
        clients = ClientBook([100.0], [10])
        apply_accruals(clients, 1e-3, 1e-3, 50.0)
        assert abs(clients.cash[0] - 100.6) < 1e-12
        assert clients.shares[0] == 10

    def test_aggregate_identity(self):
        rng = np.random.default_rng(0)
        clients = ClientBook(rng.uniform(0, 1e6, 500),
                             rng.integers(0, 1000, 500))
        m0 = clients.total_cash()
        s = clients.total_shares()
        r, d, p = 2e-3, 5e-4, 80.0
        apply_accruals(clients, r, d, p)
        expected = (1 + r) * m0 + d * p * s
        assert abs(clients.total_cash() - expected) < 1e-9 * expected


class TestRunStep:
    def test_zero_participation_leaves_price(self):
        config = make_config(rho=0.0)
        clients = init_clients(config, substream(config.seed, 0))
        state = MarketState(0, config.initial_price, clients, OrderBook(),
                            VolatilityState(), clients.total_shares())
        step = run_step(state, config)
        assert step.price == config.initial_price
        assert step.volume == 0
        assert state.t == 1

    def test_deterministic_replay(self):
        config = make_config(steps=5, agents=200)
        results = []
        for _ in range(2):
            clients = init_clients(config, substream(config.seed, 0))
            state = MarketState(0, config.initial_price, clients, OrderBook(),
                                VolatilityState(), clients.total_shares())
            results.append([run_step(state, config) for _ in range(5)])
        assert results[0] == results[1]

    def test_single_step_price_stays_near_start(self):
        # folded-gaussian limits around P0 with sigma ~0.05 bound the cross
        config = make_config(agents=1000)
        clients = init_clients(config, substream(config.seed, 0))
        state = MarketState(0, config.initial_price, clients, OrderBook(),
                            VolatilityState(), clients.total_shares())
        step = run_step(state, config)
        assert abs(step.price - 100.0) < 4 * 0.05 * 100.0


class TestRunScenario:
    def test_zero_steps(self):
        record = run_scenario(make_config(steps=0, agents=20))
        assert len(record.prices) == 0
        assert len(record.wealth_times) == 0
        np.testing.assert_allclose(record.initial_wealth, 2e6)
        np.testing.assert_allclose(record.final_wealth, record.initial_wealth)

    def test_determinism_full_record(self):
        config = make_config(steps=60, agents=300)
        a = run_scenario(config)
        b = run_scenario(config)
        np.testing.assert_array_equal(a.prices, b.prices)
        np.testing.assert_array_equal(a.volumes, b.volumes)
        np.testing.assert_array_equal(a.final_wealth, b.final_wealth)
        np.testing.assert_array_equal(a.pareto_a, b.pareto_a)

    def test_seed_changes_path(self):
        a = run_scenario(make_config(steps=40, agents=300, seed=1))
        b = run_scenario(make_config(steps=40, agents=300, seed=2))
        assert not np.array_equal(a.prices, b.prices)

    def test_closed_system_conservation(self):
        config = make_config(steps=150, agents=400)
        record = run_scenario(config)
        np.testing.assert_array_equal(record.shares_totals,
                                      record.initial_shares_total)
        m0 = record.initial_cash_total
        assert np.all(np.abs(record.cash_totals - m0) < 1e-9 * m0)
        assert record.accrual_residuals.max() < 1e-9

    def test_accrual_identity_with_flows(self):
        config = make_config(steps=100, agents=300, interest=1e-3,
                             dividend=1e-3)
        record = run_scenario(config)
        assert record.accrual_residuals.max() < 1e-9
        # cash must grow: interest plus dividends flow in
        assert record.cash_totals[-1] > record.initial_cash_total

    def test_no_negative_holdings(self):
        config = make_config(steps=120, agents=200,
                             allocation=UniformAllocation(0, 1e6))
        record = run_scenario(config)
        assert np.all(record.final_wealth >= 0)

    def test_wealth_cadence_rows(self):
        config = make_config(steps=101, agents=30, record_every=25)
        record = run_scenario(config)
        assert list(record.wealth_times) == [0, 25, 50, 75, 100]
        assert record.group_wealth.shape == (5, 1)


class TestEquilibriumPrice:
    def test_neutral(self):
        assert equilibrium_price(5e8, 5e6, 0.0) == 100.0

    def test_arithmetic(self):
        assert equilibrium_price(1e9, 10**7, 0.0) == 100.0

    def test_sell_tilt(self):
        value = equilibrium_price(1e9, 10**7, -0.3)
        assert abs(value - 0.7408 * 100.0) < 0.01

    def test_requires_shares(self):
        with pytest.raises(ValueError):
            equilibrium_price(1e9, 0, 0.0)


class TestEquilibriumDisplacementLaw:
    @pytest.mark.parametrize("psi", [-0.3, 0.0, 0.3])
    def test_long_run_price_tracks_exp_psi(self, psi):
        # closed market, constant tilt: mean price / (M/S) ~ e^psi
        config = make_config(steps=1200, agents=1000, psi=psi, seed=3)
        record = run_scenario(config)
        m_over_s = record.initial_cash_total / record.initial_shares_total
        mean_tail = record.prices[-480:].mean()
        assert abs(mean_tail / m_over_s - math.exp(psi)) \
            < 0.10 * math.exp(psi)
