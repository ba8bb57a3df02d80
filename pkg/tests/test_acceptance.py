"""Acceptance gate.

Each test below checks one shipped promise end to end and prints a single
pass/fail line (visible even without -s) so a full run reads as a checklist.
Criteria with a stated runtime budget measure it with a monotonic clock.
"""

import math
import time

import numpy as np
import pytest

from gmhd import (
    Constant,
    LogLogLog,
    LogPower,
    Power,
    PowerLog,
    SolverConfig,
    State,
    Verdict,
    assess,
    cancellation_residuals,
    comparison_table,
    decay_time_integral_identity,
    kernel_linf,
    moment_integral,
    moment_ratio_scan,
    orszag_tang,
    random_band,
    run,
    spectral_l1_ratio,
    vorticity_current_residual,
)
from gmhd.spectral import Grid


def report(capsys, num, label, ok, detail=""):
    line = f"criterion {num:02d} {'PASS' if ok else 'FAIL'} {label}"
    if detail:
        line += f"  [{detail}]"
    with capsys.disabled():
        print(("\n" if num == 1 else "") + line, flush=True)
    assert ok, line


def test_01_power_admissibility_closed_forms(capsys):
    t0 = time.monotonic()
    spec = Power(1.0)
    worst = 0.0
    for T in (1.0, 8.0, 1000.0):
        rep = assess(spec, T, tol=1e-10)
        a_exact, c_exact = T ** (-1.0 / 3.0), T ** (1.0 / 3.0)
        worst = max(
            worst,
            abs(rep.threshold - a_exact) / a_exact,
            abs(rep.integral - c_exact) / c_exact,
        )
        if rep.verdict is not Verdict.ADMISSIBLE:
            worst = math.inf
    const_verdict = assess(Constant(2.0), 1.0).verdict
    elapsed = time.monotonic() - t0
    ok = worst <= 1e-8 and const_verdict is Verdict.DIVERGENT and elapsed < 1.0
    report(
        capsys, 1, "power-family threshold and growth integral closed forms",
        ok, f"rel err {worst:.2e}, constant verdict {const_verdict.value}, {elapsed:.2f}s",
    )


def test_02_gaussian_moment_oracle(capsys):
    t0 = time.monotonic()
    spec = Constant(1.0)
    worst = 0.0
    for s in (0.0, 0.5, 1.0, 2.0, 4.0):
        for t in (0.1, 1.0, 10.0):
            exact = math.pi * math.gamma(s + 1.0) * (2.0 * t) ** (-(s + 1.0))
            got = moment_integral(spec, s, 0.0, t, tol=1e-9).value
            worst = max(worst, abs(got - exact) / exact)
    elapsed = time.monotonic() - t0
    ok = worst <= 1e-6 and elapsed < 5.0
    report(
        capsys, 2, "gaussian closed form for kernel moment integrals",
        ok, f"rel err {worst:.2e}, {elapsed:.2f}s",
    )


def test_03_moment_ratio_spread_all_families(capsys):
    t0 = time.monotonic()
    families = [Power(1.0), LogPower(2.0), PowerLog(1.0, 1.0), LogLogLog(2.0)]
    worst = 0.0
    all_passed = True
    for spec in families:
        for s, k in ((0.0, 0.0), (1.0, 0.0), (2.0, 1.0), (4.0, 4.0)):
            scan = moment_ratio_scan(
                spec, s, k, t_min=1e-3, t_max=1e3, points=9, tol=1e-7, cap=50.0
            )
            worst = max(worst, scan.spread)
            all_passed = all_passed and scan.passed
    elapsed = time.monotonic() - t0
    ok = all_passed and worst <= 50.0 and elapsed < 30.0
    report(
        capsys, 3, "moment ratio spread within cap across symbol families",
        ok, f"max spread {worst:.4g}, {elapsed:.2f}s",
    )


def test_04_decay_time_integral_identity(capsys):
    t0 = time.monotonic()
    worst_abs = 0.0
    for T in (1.0, 8.0):
        chk = decay_time_integral_identity(Power(1.0), T, tol=1e-6)
        exact = 3.0 * T ** (1.0 / 3.0)
        worst_abs = max(
            worst_abs,
            abs(chk.lhs - exact) / exact,
            abs(chk.rhs - exact) / exact,
        )
    log_gap = decay_time_integral_identity(LogPower(2.0), 1.0, tol=1e-6).rel_gap
    elapsed = time.monotonic() - t0
    ok = worst_abs <= 1e-4 and log_gap <= 1e-3 and elapsed < 10.0
    report(
        capsys, 4, "time-integral identity for the decay threshold",
        ok, f"power rel err {worst_abs:.2e}, logpower gap {log_gap:.2e}, {elapsed:.2f}s",
    )


def test_05_heat_kernel_peak_value(capsys):
    spec = Constant(1.0)
    worst = 0.0
    for t in (0.1, 1.0, 10.0):
        exact = 1.0 / (4.0 * math.pi * t)
        worst = max(worst, abs(kernel_linf(spec, t) - exact) / exact)
    ok = worst <= 1e-8
    report(capsys, 5, "heat-kernel peak value 1/(4 pi t)", ok, f"rel err {worst:.2e}")


def test_06_interpolation_ratio_bounded(capsys):
    grid = Grid(64)
    worst = 0.0
    band = (grid.kmag >= 1.0) & (grid.kmag <= 10.0)
    for seed in range(50):
        rng = np.random.default_rng(seed)
        coef = grid.to_spectral(rng.standard_normal((grid.n, grid.n)))
        coef = np.where(band, coef, 0.0)
        worst = max(worst, spectral_l1_ratio(grid, coef))
    for a in (0.5, 1.0, 2.0):
        h = np.exp(-a * ((grid.x - np.pi) ** 2 + (grid.y - np.pi) ** 2))
        worst = max(worst, spectral_l1_ratio(grid, grid.to_spectral(h)))
    ok = worst <= 4.0
    report(
        capsys, 6, "interpolation inequality ratio on seeded suite plus gaussians",
        ok, f"max ratio {worst:.4f}",
    )


def test_07_discrete_energy_identity_converges(capsys):
    t0 = time.monotonic()
    grid = Grid(128)
    u0, b0 = orszag_tang(grid)
    residuals = []
    for cfl in (0.4, 0.2):
        cfg = SolverConfig(
            grid=grid, symbol=Power(1.0), t_end=1.0, cfl=cfl, stride=5
        )
        _, ledger = run(cfg, State(u=u0.copy(), b=b0.copy()))
        residuals.append(float(np.max(np.abs(ledger.series("eres")))))
    elapsed = time.monotonic() - t0
    factor = residuals[0] / residuals[1]
    ok = residuals[0] <= 1e-6 and factor >= 8.0 and elapsed < 120.0
    report(
        capsys, 7, "discrete energy identity residual and step-halving order",
        ok, f"residual {residuals[0]:.2e}, halving factor {factor:.1f}, {elapsed:.1f}s",
    )


def test_08_nonlinear_cancellation_identities(capsys):
    grid = Grid(64)
    worst = 0.0
    for seed in range(200):
        u, b = random_band(grid, seed=seed)
        r1, r2 = cancellation_residuals(grid, u, b)
        worst = max(worst, r1, r2)
    ok = worst <= 1e-12
    report(
        capsys, 8, "advective and coupling cancellation identities",
        ok, f"max normalized residual {worst:.2e} over 200 pairs",
    )


def test_09_vorticity_current_identity(capsys):
    grid = Grid(128)
    worst = 0.0
    for seed in range(100):
        u, b = random_band(grid, seed=seed, k_min=1.0, k_max=grid.n / 4.0)
        worst = max(worst, vorticity_current_residual(grid, u, b))
    ok = worst <= 1e-10
    report(
        capsys, 9, "curl of the induction coupling including the strain term",
        ok, f"max residual {worst:.2e} over 100 pairs",
    )


def test_10_linear_branch_matches_semigroup(capsys):
    grid = Grid(32)
    spec = Power(1.0)
    u0, b0 = random_band(grid, seed=4)
    cfg = SolverConfig(
        grid=grid, symbol=spec, t_end=1.0, dt=1e-3, nonlinear=False, stride=10 ** 9
    )
    final, _ = run(cfg, State(u=u0, b=b0))
    decay = np.exp(-1.0 * spec.multiplier(grid.kmag))
    worst = float(np.max(np.abs(final.b - decay * b0)) / np.max(np.abs(b0)))
    ok = final.step == 1000 and worst <= 1e-13
    report(
        capsys, 10, "mode-exact linear decay after 1000 steps",
        ok, f"scaled sup-mode error {worst:.2e}",
    )


def test_11_divergence_and_reproducibility(capsys):
    grid = Grid(64)
    u0, b0 = random_band(grid, seed=5)
    cfg = SolverConfig(grid=grid, symbol=Power(1.0), t_end=0.2, stride=2, seed=5)
    s1, led1 = run(cfg, State(u=u0.copy(), b=b0.copy()))
    s2, led2 = run(cfg, State(u=u0.copy(), b=b0.copy()))
    div_worst = max(
        float(np.max(led1.series("divu"))), float(np.max(led1.series("divb")))
    )
    bitwise = (
        np.array_equal(s1.u, s2.u)
        and np.array_equal(s1.b, s2.b)
        and led1.to_csv() == led2.to_csv()
    )
    ok = div_worst <= 1e-11 and bitwise
    report(
        capsys, 11, "divergence preservation and bitwise reproducibility",
        ok, f"max div residual {div_worst:.2e}, bitwise {bitwise}",
    )


def test_12_growth_comparison_table(capsys):
    # exploratory: the table is the deliverable, not a threshold
    grid = Grid(64)
    u0, b0 = orszag_tang(grid)
    ledgers = {}
    for label, spec in (("power(mu1=1)", Power(1.0)), ("constant(c=1)", Constant(1.0))):
        cfg = SolverConfig(grid=grid, symbol=spec, t_end=0.5, dt=0.005, stride=10)
        _, ledgers[label] = run(cfg, State(u=u0.copy(), b=b0.copy()))
    table = comparison_table(ledgers)
    with capsys.disabled():
        print("\n" + table, flush=True)
    ok = (
        all(label in table for label in ledgers)
        and "cumulative int ||grad j||_inf dt" in table
        and "nan" not in table
        and "n/a" not in table
    )
    report(capsys, 12, "current-gradient growth comparison emitted", ok)
