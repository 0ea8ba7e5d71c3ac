"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line
(run with `pytest tests/test_acceptance.py -v -s` to watch them).

Desk-scale runs keep every scenario's parameters and rescale only the step
count.  The full-scale tail-exponent check runs only with
SENTMARKET_FULLSCALE=1 in the environment.
"""

import dataclasses
import math
import os
import time

import numpy as np
import pytest

from sentmarket.analytics import (log_returns, normal_qq_fit, pareto_sample,
                                  pareto_tail_fit, wealth_fraction)
from sentmarket.cli import main as cli_main
from sentmarket.scenarios import SCENARIO_NAMES, builtin_scenario
from sentmarket.sentiment import GaussianSpec, JumpVolatilitySpec
from sentmarket.simulation import run_scenario

from test_exchange_oracle import random_book, run_both


def criterion(number, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"\nACCEPTANCE {number} {status}: {detail}")
    assert ok, f"criterion {number}: {detail}"


def test_criterion_1_matching_oracle_equivalence():
    budget = 10.0
    rng = np.random.default_rng(20240817)
    grid = np.arange(90.0, 111.0, 1.0)
    start = time.perf_counter()
    books = 0
    mismatches = 0
    seen = set()
    for kind, count in (("continuous", 5000), ("grid", 4000), ("tiny", 1000)):
        for _ in range(count):
            if kind == "continuous":
                raw = random_book(rng, max_orders=100)
            elif kind == "grid":
                raw = random_book(rng, max_orders=100, grid=grid)
            else:
                raw = random_book(rng, max_orders=5,
                                  grid=np.array([99.0, 100.0, 101.0]))
            actual, expected, _ = run_both(raw)
            books += 1
            seen.add(actual[0])
            mismatches += actual != expected
    elapsed = time.perf_counter() - start
    all_kinds = seen >= {"none", "buy", "sell", "mixed"}
    ok = mismatches == 0 and books >= 10_000 and all_kinds \
        and elapsed < budget
    criterion(1, ok,
              f"{books} randomized books, {mismatches} mismatches vs "
              f"brute-force oracle, cross kinds seen {sorted(seen)} "
              f"[{elapsed:.1f}s < {budget:.0f}s]")


def test_criterion_2_conservation_all_builtins():
    desk_steps = 250
    worst_residual = 0.0
    share_drift = 0
    start = time.perf_counter()
    for name in SCENARIO_NAMES:
        record = run_scenario(builtin_scenario(name, steps=desk_steps))
        worst_residual = max(worst_residual,
                             float(record.accrual_residuals.max()))
        share_drift = max(share_drift, int(np.abs(
            record.shares_totals - record.initial_shares_total).max()))
    elapsed = time.perf_counter() - start
    ok = share_drift == 0 and worst_residual < 1e-9
    criterion(2, ok,
              f"12 builtin scenarios x {desk_steps} steps: share drift "
              f"{share_drift}, worst per-step cash residual "
              f"{worst_residual:.2e} < 1e-9 [{elapsed:.1f}s]")


def test_criterion_3_baseline_equilibrium_and_returns():
    budget = 60.0
    start = time.perf_counter()
    record = run_scenario(builtin_scenario("sec4-identical", steps=5000))
    elapsed = time.perf_counter() - start
    window = record.prices[-2000:]
    mean_price = float(window.mean())
    slope = float(np.polyfit(np.arange(len(window)), window, 1)[0])
    drift = abs(slope) * len(window)
    qq = normal_qq_fit(log_returns(record.prices))
    ok = (92.0 <= mean_price <= 100.0
          and drift < 0.02 * mean_price
          and qq.r_squared >= 0.99
          and 0.011 <= qq.sd <= 0.020
          and elapsed < budget)
    criterion(3, ok,
              f"mean price {mean_price:.2f} in [92, 100], window drift "
              f"{drift:.2f} < {0.02 * mean_price:.2f}, QQ R2 "
              f"{qq.r_squared:.4f} >= 0.99, sd {qq.sd:.4f} in "
              f"[0.011, 0.020] [{elapsed:.1f}s < {budget:.0f}s]")


def test_criterion_4_pareto_tail_dynamics():
    budget = 300.0
    start = time.perf_counter()
    ident = run_scenario(builtin_scenario("sec4-identical", steps=20_000))
    a_first, a_last = float(ident.pareto_a[0]), float(ident.pareto_a[-1])
    decreasing = a_last < a_first
    pareto = run_scenario(builtin_scenario("sec4-pareto", steps=20_000))
    a_pareto = float(pareto.pareto_a[-1])
    elapsed = time.perf_counter() - start
    ok = (a_first > 8.0 and decreasing and 3.0 <= a_last <= 6.5
          and a_pareto > 1.5 and elapsed < budget)
    criterion(4, ok,
              f"identical: a {a_first:.0f} -> {a_last:.2f} (in [3, 6.5]); "
              f"pareto: a 1.5 -> {a_pareto:.2f} (> 1.5) "
              f"[{elapsed:.0f}s < {budget:.0f}s]")


@pytest.mark.fullscale
@pytest.mark.skipif(os.environ.get("SENTMARKET_FULLSCALE") != "1",
                    reason="full-scale run, enable with SENTMARKET_FULLSCALE=1")
def test_criterion_4_full_scale_tail_exponent():
    record = run_scenario(builtin_scenario("sec4-identical"))
    a_final = float(record.pareto_a[-1])
    ok = 3.2 <= a_final <= 5.0
    criterion("4-full", ok, f"T=1e5 final tail exponent {a_final:.2f} "
                            f"in [3.2, 5.0]")


def test_criterion_5_sentiment_shift():
    budget = 10.0
    start = time.perf_counter()
    config = builtin_scenario("sec5-identical")
    jumpy = run_scenario(config)
    detrended = jumpy.prices / jumpy.cash_totals
    ratio = float(detrended[550:900].mean() / detrended[300:490].mean())
    qq_jump = normal_qq_fit(log_returns(jumpy.prices))

    no_jumps = dataclasses.replace(config, volatility=JumpVolatilitySpec(
        calm=config.volatility.calm, breaking=config.volatility.breaking,
        arrival_inverse_rate=GaussianSpec(0.0, 0.0)))
    calm = run_scenario(no_jumps)
    qq_calm = normal_qq_fit(log_returns(calm.prices))
    elapsed = time.perf_counter() - start
    ok = (0.66 <= ratio <= 0.82
          and qq_jump.r_squared <= 0.97
          and qq_calm.r_squared >= 0.99
          and elapsed < budget)
    criterion(5, ok,
              f"detrended price ratio {ratio:.3f} in [0.66, 0.82] "
              f"(target e^-0.3 = {math.exp(-0.3):.3f}); QQ R2 jumps "
              f"{qq_jump.r_squared:.3f} <= 0.97, no jumps "
              f"{qq_calm.r_squared:.4f} >= 0.99 [{elapsed:.1f}s < "
              f"{budget:.0f}s]")


def test_criterion_6_group_dynamics():
    budget = 60.0
    seeds = (1, 2, 3, 4, 5)
    start = time.perf_counter()
    group1, group4 = [], []
    cadence_ok = True
    for seed in seeds:
        record = run_scenario(builtin_scenario("sec6-identical", seed=seed))
        half = record.config.steps // 2
        cadence_ok &= record.group_wealth.shape[1] == 4
        cadence_ok &= half in set(record.wealth_times.tolist())
        idx = int(np.flatnonzero(record.wealth_times == half)[0])
        group1.append(record.group_wealth[idx, 0])
        group4.append(record.group_wealth[idx, 3])
    elapsed = time.perf_counter() - start
    gap = float(np.mean(group4) - np.mean(group1))
    ok = cadence_ok and gap > 0 and elapsed < budget
    criterion(6, ok,
              f"four group series at cadence 25 over {len(seeds)} seeds; "
              f"group 1 mean wealth at T/2 trails group 4 by "
              f"{gap / np.mean(group4):.1%} [{elapsed:.0f}s < "
              f"{budget:.0f}s]")


def test_criterion_7_pareto_mathematics():
    budget = 5.0
    start = time.perf_counter()
    share_80_20 = wealth_fraction(0.2, 1.16)
    share_40_1 = wealth_fraction(0.01, 1.25)
    rng = np.random.default_rng(7)
    sample = pareto_sample(1e5, 1.5, rng, n=100_000)
    roundtrip = pareto_tail_fit(sample, 0.25).a
    ranks = np.arange(1, 401, dtype=np.float64)
    exact = pareto_tail_fit(1e5 * ranks ** (-1 / 1.5), 0.25).a
    elapsed = time.perf_counter() - start
    ok = (abs(share_80_20 - 0.80) <= 0.01
          and abs(share_40_1 - 0.40) <= 0.01
          and abs(roundtrip - 1.5) <= 0.05 * 1.5
          and abs(exact - 1.5) <= 1e-9
          and elapsed < budget)
    criterion(7, ok,
              f"R(0.2; 1.16) = {share_80_20:.3f} ~ 0.80, R(0.01; 1.25) = "
              f"{share_40_1:.3f} ~ 0.40, sampler roundtrip a = "
              f"{roundtrip:.3f} ~ 1.5, exact fit |a - 1.5| = "
              f"{abs(exact - 1.5):.1e} [{elapsed:.1f}s < {budget:.0f}s]")


def test_criterion_8_byte_determinism(tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    for out in (out_a, out_b):
        code = cli_main(["run", "--scenario", "sec5-pareto", "--seed", "7",
                         "--out", str(out), "--no-figures"])
        assert code == 0
    identical = all(
        (out_a / name).read_bytes() == (out_b / name).read_bytes()
        for name in ("prices.csv", "wealth.csv", "pareto.csv", "summary.csv"))
    criterion(8, identical,
              "repeated `run --scenario sec5-pareto --seed 7` produced "
              "byte-identical prices/wealth/pareto/summary CSVs")
