"""External driving processes.

Three kinds of drivers feed the agent population:

* piecewise-constant gaussian schedules (buy/sell tilt, dividend yield,
  interest rate, inverse participation rate) -- each step the active segment
  supplies a (mu, sd) pair that individual agents draw from;
* the two-state price-uncertainty process: a calm regime most of the time,
  with breaking-news spikes arriving as a Poisson process.

All functions are pure given an explicit numpy Generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class UncoveredTime(Exception):
    """Queried step lies outside every schedule segment."""


@dataclass(frozen=True, slots=True)
class GaussianSpec:
    mu: float
    sd: float


@dataclass(frozen=True, slots=True)
class Segment:
    """Right-open interval [start, end) with a gaussian value spec."""

    start: int
    end: int
    mu: float
    sd: float


@dataclass(frozen=True, slots=True)
class RegimeSchedule:
    """Ordered segments partitioning [0, T) with no gaps or overlaps."""

    segments: tuple[Segment, ...]

    def __post_init__(self):
        prev_end = None
        for seg in self.segments:
            if seg.end <= seg.start:
                raise ValueError(f"empty segment [{seg.start}, {seg.end})")
            if seg.sd < 0:
                raise ValueError("segment sd must be >= 0")
            if prev_end is not None and seg.start != prev_end:
                raise ValueError(
                    f"segments must be contiguous, got gap/overlap at "
                    f"{prev_end} -> {seg.start}")
            prev_end = seg.end

    @property
    def start(self) -> int:
        return self.segments[0].start

    @property
    def end(self) -> int:
        return self.segments[-1].end

    def covers(self, t_end: int) -> bool:
        return bool(self.segments) and self.start == 0 and self.end >= t_end


def constant_schedule(t_end: int, mu: float, sd: float = 0.0) -> RegimeSchedule:
    return RegimeSchedule((Segment(0, t_end, mu, sd),))


def regime_value(schedule: RegimeSchedule, t: int) -> tuple[float, float]:
    """(mu, sd) of the segment containing step t.

    Boundaries belong to the later segment: with segments [0, 500) and
    [500, 1000), t=500 reads the second one.
    """
    for seg in schedule.segments:
        if seg.start <= t < seg.end:
            return seg.mu, seg.sd
    raise UncoveredTime(f"step {t} outside schedule "
                        f"[{schedule.start}, {schedule.end})")


@dataclass(frozen=True, slots=True)
class JumpVolatilitySpec:
    """Two-state price-uncertainty process.

    Breaking news arrives as a Poisson process whose per-step inverse mean
    inter-arrival time is itself a gaussian draw (clamped at zero); while a
    breaking spell is active the agents read their uncertainty from the
    `breaking` spec instead of `calm`.
    """

    calm: GaussianSpec
    breaking: GaussianSpec
    arrival_inverse_rate: GaussianSpec
    breaking_duration: int = 1

    def __post_init__(self):
        if not (self.breaking.mu > self.calm.mu > 0):
            raise ValueError("need breaking mu > calm mu > 0")
        if self.arrival_inverse_rate.mu < 0:
            raise ValueError("arrival inverse rate mu must be >= 0")
        if self.breaking_duration < 1:
            raise ValueError("breaking_duration must be >= 1")


@dataclass(frozen=True, slots=True)
class VolatilityState:
    regime: str = "calm"  # "calm" | "breaking"
    steps_left_in_breaking: int = 0


def step_volatility(spec: JumpVolatilitySpec, state: VolatilityState,
                    rng) -> tuple[VolatilityState, GaussianSpec]:
    """Advance the news process one step; returns (state', active spec).

    Consumes exactly two draws: the per-step inverse arrival rate and the
    arrival uniform.  An arrival (probability 1 - exp(-rate)) re-arms the
    breaking countdown even if a spell is already running.
    """
    x = max(0.0, rng.normal(spec.arrival_inverse_rate.mu,
                            spec.arrival_inverse_rate.sd))
    arrived = rng.random() < -math.expm1(-x)
    if arrived:
        state = VolatilityState("breaking", spec.breaking_duration)
    elif state.regime == "breaking":
        left = state.steps_left_in_breaking - 1
        state = VolatilityState("breaking", left) if left > 0 \
            else VolatilityState("calm", 0)
    active = spec.breaking if state.regime == "breaking" else spec.calm
    return state, active


SIGMA_FLOOR = 1e-6


def sample_agent_params(psi_spec: GaussianSpec, sigma_spec: GaussianSpec,
                        rho_spec: GaussianSpec, rng) -> tuple[float, float, float]:
    """One agent's per-step (psi, sigma, x) draws.

    psi (buy/sell tilt) is unclamped; sigma (relative price uncertainty) is
    clamped up to SIGMA_FLOOR and x (inverse participation time) down to 0,
    so the draw count stays fixed regardless of outcomes.
    """
    psi = rng.normal(psi_spec.mu, psi_spec.sd)
    sigma = max(SIGMA_FLOOR, rng.normal(sigma_spec.mu, sigma_spec.sd))
    x = max(0.0, rng.normal(rho_spec.mu, rho_spec.sd))
    return psi, sigma, x
