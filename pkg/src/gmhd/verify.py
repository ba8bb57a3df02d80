"""Fast self-check suite behind the ``verify`` subcommand.

Each check is a sampled version of a package invariant, sized to run in
seconds; the exhaustive versions live in the test suite.  Checks are named
``group.detail`` so ``--only group`` selects a family of them.
"""

from __future__ import annotations

import math

import numpy as np

from . import admissibility as adm
from . import diagnostics, kernel_analysis, presets, spectral, symbols
from .solver import SolverConfig, State, run

_CHECKS = []


def _check(name):
    def deco(fn):
        _CHECKS.append((name, fn))
        return fn

    return deco


def _relerr(x, ref):
    return abs(x - ref) / abs(ref)


@_check("symbols.positive_monotone")
def _c_symbols_monotone():
    fams = [
        symbols.Power(1.0),
        symbols.Power(2.5),
        symbols.LogPower(2.0),
        symbols.PowerLog(1.0, 1.0),
        symbols.LogLogLog(2.0),
        symbols.Constant(0.7),
    ]
    bad = [s.label() for s in fams if not symbols.monotonicity_check(s)]
    return not bad, f"failing families: {bad}" if bad else "6 families positive, non-decreasing"


@_check("symbols.power_derivative_constants")
def _c_symbols_mikhlin():
    worst = 0.0
    for mu in (0.5, 1.0, 2.0, 3.5):
        rep = symbols.check_mikhlin(symbols.Power(mu))
        worst = max(worst, _relerr(rep.order1, mu))
        ref2 = abs(mu * (mu - 1.0))
        if ref2 > 0:
            worst = max(worst, _relerr(rep.order2, ref2))
    return worst <= 1e-10, f"max relative error {worst:.2e} (cap 1e-10)"


@_check("symbols.tabulated_knots")
def _c_symbols_tabulated():
    r = np.array([0.5, 1.0, 2.0, 4.0])
    tab = symbols.Tabulated(r, r)  # samples of g(r) = r
    err = float(np.max(np.abs(np.asarray(tab.g(r)) - r)))
    extrap = abs(tab.g(8.0) - 8.0)
    ok = err == 0.0 and extrap <= 1e-12
    return ok, f"knot error {err:.1e}, linear extension error {extrap:.1e}"


@_check("admissibility.power_scaling")
def _c_adm_power():
    spec = symbols.Power(1.0)
    worst = 0.0
    for T in (1.0, 8.0, 1000.0):
        rep = adm.assess(spec, T)
        worst = max(worst, _relerr(rep.threshold, T ** (-1.0 / 3.0)))
        worst = max(worst, _relerr(rep.integral, T ** (1.0 / 3.0)))
        if rep.verdict is not adm.Verdict.ADMISSIBLE:
            return False, f"T={T}: verdict {rep.verdict.value}"
    return worst <= 1e-8, f"max relative error {worst:.2e} (cap 1e-8)"


@_check("admissibility.divergent_cases")
def _c_adm_divergent():
    cases = [symbols.Constant(1.0), symbols.LogPower(1.0)]
    verdicts = [adm.assess(s, 1.0).verdict for s in cases]
    ok = all(v is adm.Verdict.DIVERGENT for v in verdicts)
    return ok, f"verdicts: {[v.value for v in verdicts]}"


@_check("kernel.gaussian_moments")
def _c_kernel_moments():
    spec = symbols.Constant(1.0)
    worst = 0.0
    for s in (0.0, 1.0, 2.0):
        for t in (0.1, 1.0, 10.0):
            got = kernel_analysis.moment_integral(spec, s, 0.0, t, tol=1e-8).value
            ref = math.pi * math.gamma(s + 1.0) * (2.0 * t) ** (-(s + 1.0))
            worst = max(worst, _relerr(got, ref))
    return worst <= 1e-6, f"max relative error {worst:.2e} (cap 1e-6)"


@_check("kernel.heat_peak")
def _c_kernel_peak():
    spec = symbols.Constant(1.0)
    worst = max(
        _relerr(kernel_analysis.kernel_linf(spec, t), 1.0 / (4.0 * math.pi * t))
        for t in (0.1, 1.0, 10.0)
    )
    return worst <= 1e-8, f"max relative error {worst:.2e} (cap 1e-8)"


@_check("kernel.ratio_spread")
def _c_kernel_spread():
    worst = 0.0
    for spec in (symbols.Power(1.0), symbols.LogPower(2.0)):
        for s, k in ((1.0, 0.0), (2.0, 1.0)):
            scan = kernel_analysis.moment_ratio_scan(
                spec, s, k, t_min=1e-2, t_max=1e2, points=6
            )
            worst = max(worst, scan.spread)
    return worst <= 50.0, f"max ratio spread {worst:.3g} (cap 50)"


@_check("kernel.time_integral_identity")
def _c_kernel_identity():
    spec = symbols.Power(1.0)
    worst = max(
        kernel_analysis.decay_time_integral_identity(spec, T).rel_gap for T in (1.0, 8.0)
    )
    return worst <= 1e-4, f"max relative gap {worst:.2e} (cap 1e-4)"


@_check("kernel.semigroup_property")
def _c_kernel_semigroup():
    spec = symbols.PowerLog(1.0, 1.0)
    r = np.logspace(-2, 2, 64)
    m = spec.multiplier(r)
    worst = 0.0
    for t1, t2 in ((0.1, 0.7), (1.0, 2.5)):
        lhs = np.exp(-t1 * m) * np.exp(-t2 * m)
        rhs = np.exp(-(t1 + t2) * m)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst <= 1e-14, f"max pointwise defect {worst:.2e} (cap 1e-14)"


@_check("kernel.interpolation_ratio")
def _c_kernel_interp():
    grid = spectral.Grid(64)
    worst = 0.0
    for sigma in (0.3, 0.45, 0.6):
        h = np.exp(-((grid.x - np.pi) ** 2 + (grid.y - np.pi) ** 2) / (2.0 * sigma ** 2))
        worst = max(worst, kernel_analysis.spectral_l1_ratio(grid, grid.to_spectral(h)))
    rng = np.random.default_rng(7)
    for _ in range(10):
        coef = presets.random_divfree_field(grid, rng, 1, 16)[0]
        worst = max(worst, kernel_analysis.spectral_l1_ratio(grid, coef))
    return worst <= 4.0, f"max ratio {worst:.4g} (cap 4)"


@_check("spectral.roundtrip_parseval")
def _c_spectral_roundtrip():
    grid = spectral.Grid(32)
    rng = np.random.default_rng(3)
    phys = rng.standard_normal((32, 32))
    coef = grid.to_spectral(phys)
    round_err = float(np.max(np.abs(grid.to_physical(coef) - phys)))
    pars = _relerr(
        spectral.l2_norm(grid, coef) ** 2,
        float(np.sum(phys ** 2)) * grid.dx ** 2,
    )
    ok = round_err <= 1e-12 and pars <= 1e-12
    return ok, f"roundtrip {round_err:.1e}, Parseval defect {pars:.1e}"


@_check("spectral.leray_dealias")
def _c_spectral_leray():
    grid = spectral.Grid(32)
    rng = np.random.default_rng(5)
    v = np.stack([grid.to_spectral(rng.standard_normal((32, 32))) for _ in range(2)])
    p = grid.leray(v)
    div = grid.div_residual(p)
    idem = float(np.max(np.abs(grid.leray(p) - p)))
    sq = grid.product(grid.to_spectral(np.cos(grid.x)), grid.to_spectral(np.cos(grid.x)))
    ref = grid.scalar()
    ref[0, 0] = 0.5
    ref[2, 0] = 0.25
    ref[-2, 0] = 0.25
    prod_err = float(np.max(np.abs(sq - ref)))
    ok = div <= 1e-13 and idem <= 1e-13 and prod_err <= 1e-14
    return ok, f"div {div:.1e}, idempotency {idem:.1e}, cos^2 defect {prod_err:.1e}"


@_check("spectral.gradient_split")
def _c_spectral_gradient():
    grid = spectral.Grid(32)
    spec = symbols.LogPower(2.0)
    m = spec.multiplier(grid.kmag)
    c1, c2 = spectral.gradient_split_constants(spec)
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(20):
        phi = grid.to_spectral(rng.standard_normal((32, 32)))
        lhs = spectral.hdot_norm(grid, phi, 1.0)
        rhs = c1 * spectral.l2_norm(grid, phi) + c2 * spectral.diss_norm(grid, phi, m)
        worst = max(worst, lhs / rhs)
    return worst <= 1.0 + 1e-12, f"max ||grad||/(C1||.||+C2||L^1/2 .||) = {worst:.6f}"


@_check("energy.linear_exact_decay")
def _c_energy_linear():
    grid = spectral.Grid(32)
    spec = symbols.Power(1.0)
    cfg = SolverConfig(grid=grid, symbol=spec, t_end=0.3, dt=1e-3, nonlinear=False)
    u0, b0 = presets.random_band(grid, seed=2, k_max=8)
    final, ledger = run(cfg, State(u=u0.copy(), b=b0.copy()))
    m = spec.multiplier(grid.kmag)
    exact = b0 * np.exp(-0.3 * m)
    scale = np.max(np.abs(exact))
    err = float(np.max(np.abs(final.b - exact))) / scale
    d_exact = grid.box_length ** 2 * float(
        np.sum((np.abs(b0[0]) ** 2 + np.abs(b0[1]) ** 2) * 0.5 * (1.0 - np.exp(-2.0 * 0.3 * m)))
    )
    d_err = _relerr(ledger.series("dissint")[-1], d_exact)
    ok = err <= 1e-13 and d_err <= 1e-10
    return ok, f"mode decay error {err:.2e} (cap 1e-13), dissipation error {d_err:.2e} (cap 1e-10)"


@_check("energy.nonlinear_residual")
def _c_energy_nonlinear():
    grid = spectral.Grid(64)
    cfg = SolverConfig(grid=grid, symbol=symbols.Power(1.0), t_end=0.25)
    u0, b0 = presets.orszag_tang(grid)
    _, ledger = run(cfg, State(u=u0, b=b0))
    res = diagnostics.energy_residual(ledger)
    return res <= 1e-6, f"energy residual {res:.2e} (cap 1e-6)"


@_check("energy.reproducibility")
def _c_energy_repro():
    grid = spectral.Grid(32)
    csvs = []
    for _ in range(2):
        cfg = SolverConfig(grid=grid, symbol=symbols.Power(1.0), t_end=0.1)
        u0, b0 = presets.random_band(grid, seed=9, k_max=8)
        _, ledger = run(cfg, State(u=u0, b=b0))
        csvs.append(ledger.to_csv())
    ok = csvs[0] == csvs[1]
    return ok, "two seeded runs byte-identical" if ok else "ledgers differ"


@_check("solver.divergence_preserved")
def _c_solver_divergence():
    grid = spectral.Grid(32)
    cfg = SolverConfig(grid=grid, symbol=symbols.Power(1.0), t_end=0.2)
    u0, b0 = presets.random_band(grid, seed=4, k_max=8)
    _, ledger = run(cfg, State(u=u0, b=b0))
    worst = max(float(np.max(ledger.series("divu"))), float(np.max(ledger.series("divb"))))
    return worst <= 1e-11, f"max divergence residual {worst:.2e} (cap 1e-11)"


@_check("cancellation.advective_pairs")
def _c_cancellation():
    grid = spectral.Grid(64)
    rng = np.random.default_rng(13)
    worst = 0.0
    for _ in range(30):
        u = presets.random_divfree_field(grid, rng, 1, grid.n // 3)
        b = presets.random_divfree_field(grid, rng, 1, grid.n // 3)
        vel, cur = diagnostics.cancellation_residuals(grid, u, b)
        worst = max(worst, vel, cur)
    return worst <= 1e-12, f"max normalized defect {worst:.2e} (cap 1e-12)"


@_check("identity.vorticity_current")
def _c_vorticity_current():
    grid = spectral.Grid(64)
    rng = np.random.default_rng(17)
    worst = 0.0
    for _ in range(20):
        u = presets.random_divfree_field(grid, rng, 1, grid.n // 4)
        b = presets.random_divfree_field(grid, rng, 1, grid.n // 4)
        worst = max(worst, diagnostics.vorticity_current_residual(grid, u, b))
    return worst <= 1e-10, f"max relative residual {worst:.2e} (cap 1e-10)"


@_check("interpolation.gradient_chain")
def _c_interp_chain():
    grid = spectral.Grid(64)
    rng = np.random.default_rng(19)
    worst = 0.0
    for _ in range(20):
        b = presets.random_divfree_field(grid, rng, 1, grid.n // 4)
        worst = max(worst, diagnostics.interpolation_chain_ratio(grid, b))
    return worst <= 4.0, f"max chain ratio {worst:.4g} (cap 4)"


@_check("monitor.linear_run")
def _c_monitor():
    grid = spectral.Grid(32)
    cfg = SolverConfig(grid=grid, symbol=symbols.Power(2.0), t_end=0.5, dt=2e-3, nonlinear=False)
    u0, b0 = presets.random_band(grid, seed=21, k_max=8)
    _, ledger = run(cfg, State(u=u0, b=b0))
    summary = diagnostics.monitor(ledger)
    vals = [
        summary.sup_b_linf,
        summary.j_linf_l2t,
        summary.grad_j_linf_l1t,
        summary.sup_omega_linf,
        summary.grad_b_linf_l2t,
    ]
    finite = all(v is not None and np.isfinite(v) for v in vals)
    quiet = not any(summary.growth_flags.values())
    return finite and quiet, f"quantities finite={finite}, growth flags {summary.growth_flags}"


def run_checks(only: str | None = None, inject_failure: bool = False):
    """Run the (filtered) checks; returns (results, all_passed).

    results entries are (name, passed, detail).
    """
    selected = [(n, f) for n, f in _CHECKS if only is None or only in n]
    results = []
    for name, fn in selected:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append((name, bool(ok), detail))
    if inject_failure:
        results.append(("selftest.injected_failure", False, "deliberate failure injection"))
    all_ok = all(ok for _, ok, _ in results)
    return results, all_ok
