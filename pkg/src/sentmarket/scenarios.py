"""Built-in scenario registry.

Twelve scenarios: three market environments crossed with the four initial
wealth allocations (identical, uniform, normal, pareto).

* ``sec4-*``: stationary baseline.  No interest, no dividend, neutral
  buy/sell tilt, calm-only uncertainty; the price mean-reverts and wealth
  slowly redistributes.  Long horizon (1e5 steps).
* ``sec5-*``: a market-wide downgrade.  Neutral tilt for the first half,
  then a sell tilt of -0.3; breaking-news volatility spikes arrive at
  inverse rate 0.08; per-step interest 1e-3 inflates cash.
* ``sec6-*``: four equal groups with different tilt schedules (one turns
  strongly bearish in bursts, one mildly bullish mid-run, one strongly
  bullish late, one stays neutral), with dividends switched off in the last
  quarter.

Schedule breakpoints scale with the step count, so shorter desk-scale runs
keep the same shape.
"""

from __future__ import annotations

from .config import (Allocation, GroupSpec, IdenticalAllocation,
                     NormalAllocation, ParetoAllocation, ScenarioConfig,
                     UniformAllocation, validate_config)
from .sentiment import (GaussianSpec, JumpVolatilitySpec, RegimeSchedule,
                        Segment, constant_schedule)

DEFAULT_AGENTS = 1000
DEFAULT_PRICE = 100.0

ALLOCATIONS: dict[str, Allocation] = {
    "identical": IdenticalAllocation(),
    "uniform": UniformAllocation(),
    "normal": NormalAllocation(),
    "pareto": ParetoAllocation(),
}

CALM = GaussianSpec(0.05, 0.001)
BREAKING = GaussianSpec(0.2, 0.001)


def _schedule(t_end: int, *points: tuple[float, float, float]) -> RegimeSchedule:
    """Build a schedule from (fraction-of-T boundary, mu, sd) triples."""
    bounds = [round(frac * t_end) for frac, _, _ in points] + [t_end]
    segments = tuple(Segment(bounds[i], bounds[i + 1], mu, sd)
                     for i, (_, mu, sd) in enumerate(points)
                     if bounds[i + 1] > bounds[i])
    return RegimeSchedule(segments)


def _sec4(allocation: str, steps: int, seed: int) -> ScenarioConfig:
    return ScenarioConfig(
        name=f"sec4-{allocation}",
        agents=DEFAULT_AGENTS,
        steps=steps,
        initial_price=DEFAULT_PRICE,
        allocation=ALLOCATIONS[allocation],
        stock_fraction=0.5,
        interest=constant_schedule(steps, 0.0),
        dividend=constant_schedule(steps, 0.0),
        participation=constant_schedule(steps, 0.1, 0.01),
        groups=(GroupSpec(DEFAULT_AGENTS, constant_schedule(steps, 0.0)),),
        volatility=JumpVolatilitySpec(
            calm=CALM, breaking=BREAKING,
            arrival_inverse_rate=GaussianSpec(0.0, 0.0)),
        seed=seed,
        record_every=50,
        tail_fraction=0.25,
    )


def _sec5(allocation: str, steps: int, seed: int) -> ScenarioConfig:
    return ScenarioConfig(
        name=f"sec5-{allocation}",
        agents=DEFAULT_AGENTS,
        steps=steps,
        initial_price=DEFAULT_PRICE,
        allocation=ALLOCATIONS[allocation],
        stock_fraction=0.5,
        interest=constant_schedule(steps, 1e-3),
        dividend=constant_schedule(steps, 0.0),
        participation=constant_schedule(steps, 0.3, 0.01),
        groups=(GroupSpec(
            DEFAULT_AGENTS,
            _schedule(steps, (0.0, 0.0, 0.01), (0.5, -0.3, 0.01))),),
        volatility=JumpVolatilitySpec(
            calm=CALM, breaking=BREAKING,
            arrival_inverse_rate=GaussianSpec(0.08, 1e-4)),
        seed=seed,
        record_every=50,
        tail_fraction=0.25,
    )


def _sec6(allocation: str, steps: int, seed: int) -> ScenarioConfig:
    neutral, spread = 0.0, 0.1
    group_size = DEFAULT_AGENTS // 4
    tilts = (
        _schedule(steps, (0.0, neutral, spread), (0.25, -1.0, spread),
                  (0.5, neutral, spread), (0.75, -1.0, spread)),
        _schedule(steps, (0.0, neutral, spread), (0.5, 0.1, spread),
                  (0.75, neutral, spread)),
        _schedule(steps, (0.0, neutral, spread), (0.75, 1.0, spread)),
        _schedule(steps, (0.0, neutral, spread)),
    )
    return ScenarioConfig(
        name=f"sec6-{allocation}",
        agents=DEFAULT_AGENTS,
        steps=steps,
        initial_price=DEFAULT_PRICE,
        allocation=ALLOCATIONS[allocation],
        stock_fraction=0.5,
        interest=constant_schedule(steps, 5e-4),
        dividend=_schedule(steps, (0.0, 1e-3, 2e-4), (0.75, 0.0, 0.0)),
        participation=constant_schedule(steps, 0.6, 0.01),
        groups=tuple(GroupSpec(group_size, tilt) for tilt in tilts),
        volatility=JumpVolatilitySpec(
            calm=CALM, breaking=BREAKING,
            arrival_inverse_rate=GaussianSpec(0.005, 1e-4)),
        seed=seed,
        record_every=25,
        tail_fraction=0.25,
    )


_FAMILIES = {
    "sec4": (_sec4, 100_000),
    "sec5": (_sec5, 1_000),
    "sec6": (_sec6, 1_000),
}

SCENARIO_NAMES = tuple(f"{family}-{alloc}" for family in _FAMILIES
                       for alloc in ALLOCATIONS)


class UnknownScenario(KeyError):
    pass


def builtin_scenario(name: str, steps: int | None = None,
                     seed: int | None = None) -> ScenarioConfig:
    """Instantiate a built-in scenario, optionally overriding steps/seed."""
    family, _, allocation = name.partition("-")
    if family not in _FAMILIES or allocation not in ALLOCATIONS:
        raise UnknownScenario(name)
    build, default_steps = _FAMILIES[family]
    config = build(allocation, steps if steps is not None else default_steps,
                   seed if seed is not None else 1)
    validate_config(config)
    return config
