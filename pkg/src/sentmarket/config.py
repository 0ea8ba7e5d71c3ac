"""Declarative scenario configuration.

A scenario is a JSON document; the same dataclasses also back the built-in
scenarios.  Schema (all schedules are lists of ``{"from", "to", "mu", "sd"}``
segments over right-open step intervals that must cover [0, steps) exactly):

    {
      "name": "my-run",
      "agents": 1000,
      "steps": 1000,
      "initial_price": 100.0,
      "allocation": {"kind": "pareto", "w0": 1e5, "a": 1.5},
      "stock_fraction": 0.5,
      "interest": [{"from": 0, "to": 1000, "mu": 0.001, "sd": 0.0}],
      "dividend": [...],
      "participation": [...],                  # inverse mean inter-trade time
      "groups": [{"size": 1000, "sentiment": [...]}, ...],
      "volatility": {"calm": {"mu": 0.05, "sd": 0.001},
                     "breaking": {"mu": 0.2, "sd": 0.001},
                     "inv_rate": {"mu": 0.0, "sd": 0.0},
                     "duration": 1},
      "seed": 1,
      "record_every": 50,
      "tail_fraction": 0.25
    }

Allocation kinds: ``identical`` {mu, sd}, ``uniform`` {low, high},
``normal`` {mu, sd}, ``pareto`` {w0, a}.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .sentiment import GaussianSpec, JumpVolatilitySpec, RegimeSchedule, Segment


class ParseError(Exception):
    """Config text is syntactically or structurally unreadable."""


class ValidationError(Exception):
    """Config parsed but violates a scenario invariant."""


@dataclass(frozen=True, slots=True)
class IdenticalAllocation:
    mu: float = 2e6
    sd: float = 1e3
    kind = "identical"

    def draw(self, rng, n: int) -> np.ndarray:
        return np.maximum(0.0, rng.normal(self.mu, self.sd, n))


@dataclass(frozen=True, slots=True)
class UniformAllocation:
    low: float = 0.0
    high: float = 1e6
    kind = "uniform"

    def draw(self, rng, n: int) -> np.ndarray:
        return rng.uniform(self.low, self.high, n)


@dataclass(frozen=True, slots=True)
class NormalAllocation:
    mu: float = 1e6
    sd: float = 3e5
    kind = "normal"

    def draw(self, rng, n: int) -> np.ndarray:
        return np.maximum(0.0, rng.normal(self.mu, self.sd, n))


@dataclass(frozen=True, slots=True)
class ParetoAllocation:
    w0: float = 1e5
    a: float = 1.5
    kind = "pareto"

    def draw(self, rng, n: int) -> np.ndarray:
        u = 1.0 - rng.random(n)  # uniform on (0, 1]
        return self.w0 * u ** (-1.0 / self.a)


Allocation = (IdenticalAllocation | UniformAllocation
              | NormalAllocation | ParetoAllocation)

_ALLOCATION_KINDS = {
    "identical": IdenticalAllocation,
    "uniform": UniformAllocation,
    "normal": NormalAllocation,
    "pareto": ParetoAllocation,
}


@dataclass(frozen=True, slots=True)
class GroupSpec:
    size: int
    sentiment: RegimeSchedule


@dataclass(frozen=True, slots=True)
class ScenarioConfig:
    name: str
    agents: int
    steps: int
    initial_price: float
    allocation: Allocation
    stock_fraction: float
    interest: RegimeSchedule
    dividend: RegimeSchedule
    participation: RegimeSchedule
    groups: tuple[GroupSpec, ...]
    volatility: JumpVolatilitySpec
    seed: int
    record_every: int
    tail_fraction: float

    def group_index(self) -> np.ndarray:
        """Per-agent group index (0-based), agents assigned in config order."""
        return np.repeat(np.arange(len(self.groups)),
                         [g.size for g in self.groups])


def validate_config(config: ScenarioConfig) -> None:
    """Raise ValidationError on any violated scenario invariant."""
    if config.agents < 1:
        raise ValidationError("agents must be >= 1")
    if config.steps < 0:
        raise ValidationError("steps must be >= 0")
    if not config.initial_price > 0:
        raise ValidationError("initial_price must be > 0")
    if not 0.0 <= config.stock_fraction <= 1.0:
        raise ValidationError("stock_fraction must be in [0, 1]")
    if not 0.0 < config.tail_fraction <= 1.0:
        raise ValidationError("tail_fraction must be in (0, 1]")
    if config.record_every < 1:
        raise ValidationError("record_every must be >= 1")
    if not config.groups:
        raise ValidationError("at least one agent group is required")
    total = sum(g.size for g in config.groups)
    if total != config.agents:
        raise ValidationError(
            f"group sizes sum to {total}, expected agents={config.agents}")
    if config.steps > 0:
        named = [("interest", config.interest),
                 ("dividend", config.dividend),
                 ("participation", config.participation)]
        named += [(f"groups[{i}].sentiment", g.sentiment)
                  for i, g in enumerate(config.groups)]
        for label, schedule in named:
            if not schedule.covers(config.steps):
                raise ValidationError(
                    f"{label} schedule does not cover [0, {config.steps})")


# -- JSON (de)serialization ---------------------------------------------------


def _segments_from_json(raw, where: str) -> RegimeSchedule:
    if not isinstance(raw, list) or not raw:
        raise ParseError(f"{where}: expected a non-empty list of segments")
    segments = []
    for i, seg in enumerate(raw):
        try:
            segments.append(Segment(int(seg["from"]), int(seg["to"]),
                                    float(seg["mu"]), float(seg["sd"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"{where}[{i}]: {exc}") from exc
    try:
        return RegimeSchedule(tuple(segments))
    except ValueError as exc:
        raise ValidationError(f"{where}: {exc}") from exc


def _segments_to_json(schedule: RegimeSchedule) -> list[dict]:
    return [{"from": s.start, "to": s.end, "mu": s.mu, "sd": s.sd}
            for s in schedule.segments]


def _gaussian_from_json(raw, where: str) -> GaussianSpec:
    try:
        return GaussianSpec(float(raw["mu"]), float(raw["sd"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{where}: {exc}") from exc


def _allocation_from_json(raw) -> Allocation:
    try:
        kind = raw["kind"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"allocation: missing 'kind' ({exc})") from exc
    cls = _ALLOCATION_KINDS.get(kind)
    if cls is None:
        raise ParseError(f"allocation: unknown kind {kind!r}")
    params = {k: float(v) for k, v in raw.items() if k != "kind"}
    try:
        return cls(**params)
    except TypeError as exc:
        raise ParseError(f"allocation: {exc}") from exc


def _allocation_to_json(alloc: Allocation) -> dict:
    out = {"kind": alloc.kind}
    for name in alloc.__dataclass_fields__:
        out[name] = getattr(alloc, name)
    return out


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a scenario document; raises ParseError or
    ValidationError."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ParseError("top level must be an object")

    def need(key):
        if key not in raw:
            raise ParseError(f"missing required field {key!r}")
        return raw[key]

    try:
        groups_raw = need("groups")
        if not isinstance(groups_raw, list) or not groups_raw:
            raise ParseError("groups: expected a non-empty list")
        groups = []
        for i, g in enumerate(groups_raw):
            if not isinstance(g, dict):
                raise ParseError(f"groups[{i}]: expected an object")
            try:
                size = int(g["size"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"groups[{i}].size: {exc}") from exc
            groups.append(GroupSpec(
                size, _segments_from_json(g.get("sentiment"),
                                          f"groups[{i}].sentiment")))
        vol_raw = need("volatility")
        if not isinstance(vol_raw, dict):
            raise ParseError("volatility: expected an object")
        try:
            volatility = JumpVolatilitySpec(
                calm=_gaussian_from_json(vol_raw.get("calm"), "volatility.calm"),
                breaking=_gaussian_from_json(vol_raw.get("breaking"),
                                             "volatility.breaking"),
                arrival_inverse_rate=_gaussian_from_json(
                    vol_raw.get("inv_rate"), "volatility.inv_rate"),
                breaking_duration=int(vol_raw.get("duration", 1)),
            )
        except ValueError as exc:
            raise ValidationError(f"volatility: {exc}") from exc

        config = ScenarioConfig(
            name=str(need("name")),
            agents=int(need("agents")),
            steps=int(need("steps")),
            initial_price=float(need("initial_price")),
            allocation=_allocation_from_json(need("allocation")),
            stock_fraction=float(raw.get("stock_fraction", 0.5)),
            interest=_segments_from_json(need("interest"), "interest"),
            dividend=_segments_from_json(need("dividend"), "dividend"),
            participation=_segments_from_json(need("participation"),
                                              "participation"),
            groups=tuple(groups),
            volatility=volatility,
            seed=int(need("seed")),
            record_every=int(raw.get("record_every", 50)),
            tail_fraction=float(raw.get("tail_fraction", 0.25)),
        )
    except (TypeError, ValueError) as exc:
        raise ParseError(str(exc)) from exc

    validate_config(config)
    return config


def serialize_config(config: ScenarioConfig) -> str:
    """Canonical JSON text; parse_config(serialize_config(c)) == c."""
    doc = {
        "name": config.name,
        "agents": config.agents,
        "steps": config.steps,
        "initial_price": config.initial_price,
        "allocation": _allocation_to_json(config.allocation),
        "stock_fraction": config.stock_fraction,
        "interest": _segments_to_json(config.interest),
        "dividend": _segments_to_json(config.dividend),
        "participation": _segments_to_json(config.participation),
        "groups": [{"size": g.size,
                    "sentiment": _segments_to_json(g.sentiment)}
                   for g in config.groups],
        "volatility": {
            "calm": {"mu": config.volatility.calm.mu,
                     "sd": config.volatility.calm.sd},
            "breaking": {"mu": config.volatility.breaking.mu,
                         "sd": config.volatility.breaking.sd},
            "inv_rate": {"mu": config.volatility.arrival_inverse_rate.mu,
                         "sd": config.volatility.arrival_inverse_rate.sd},
            "duration": config.volatility.breaking_duration,
        },
        "seed": config.seed,
        "record_every": config.record_every,
        "tail_fraction": config.tail_fraction,
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def config_hash(config: ScenarioConfig) -> str:
    """Stable hash of the canonical serialization."""
    return hashlib.sha256(serialize_config(config).encode()).hexdigest()
