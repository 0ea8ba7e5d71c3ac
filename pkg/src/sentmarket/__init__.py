"""Sentiment-driven artificial stock market simulator."""

from .agents import AgentProfile, StepSnapshot, TradeIntent, form_intent
from .analytics import (ParetoFit, QQFit, WealthSnapshot, log_returns,
                        normal_qq_fit, pareto_sample, pareto_tail_fit,
                        wealth_fraction)
from .config import ScenarioConfig, parse_config, serialize_config
from .exchange import (ClearingResult, ClientBook, CrossType, Order,
                       OrderBook, Side)
from .scenarios import SCENARIO_NAMES, builtin_scenario
from .sentiment import (GaussianSpec, JumpVolatilitySpec, RegimeSchedule,
                        Segment, VolatilityState)
from .simulation import (MarketState, SimulationRecord, equilibrium_price,
                         run_scenario, run_step)

__version__ = "0.1.0"
