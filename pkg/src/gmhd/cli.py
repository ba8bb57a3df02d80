"""Command line front end.

Exit codes:
  0   success
  2   at least one horizon judged divergent (admissibility)
  3   inconclusive: undecided verdict, unmet tolerance, or a failed scan cap
  4   time integration aborted on instability (partial outputs written)
  64  usage errors
  65  precondition violations (bad parameters, incompatible inputs)
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__, admissibility as adm
from . import diagnostics, kernel_analysis, manifest, presets, symbols, verify
from .config import load_config
from .errors import (
    GmhdError,
    GridMismatchError,
    InstabilityError,
    ParameterError,
    ToleranceError,
)
from .snapshot import read_snapshot, write_snapshot
from .solver import SolverConfig, State, run
from .spectral import Grid

EXIT_OK = 0
EXIT_DIVERGENT = 2
EXIT_INCONCLUSIVE = 3
EXIT_INSTABILITY = 4
EXIT_USAGE = 64
EXIT_PRECONDITION = 65


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; the contract here reserves 2 for verdicts."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


_FAMILY_PRIMARY = {"power": "mu1", "logpower": "mu2", "powerlog": "mu3", "logloglog": "mu5"}


def _add_symbol_args(p):
    p.add_argument("--config", metavar="INI", help="config file; [symbol] supplies the symbol")
    p.add_argument(
        "--family",
        choices=["power", "logpower", "powerlog", "logloglog", "constant", "tabulated"],
        help="symbol family (overrides --config)",
    )
    p.add_argument("--mu", type=float, help="primary exponent (meaning set by the family)")
    p.add_argument("--mu4", type=float, help="secondary log exponent (powerlog only)")
    p.add_argument("--c", type=float, help="level of a constant symbol")
    p.add_argument("--knots", metavar="CSV", help="r,g knot table for a tabulated symbol")


def _resolve_symbol(parser, args):
    if args.family:
        fam = args.family
        if fam == "tabulated":
            if not args.knots:
                parser.error("--family tabulated requires --knots")
            return symbols.make_symbol("tabulated", knots_csv=args.knots)
        if fam == "constant":
            return symbols.make_symbol("constant", c=1.0 if args.c is None else args.c)
        if args.mu is None:
            parser.error(f"--family {fam} requires --mu")
        params = {_FAMILY_PRIMARY[fam]: args.mu}
        if fam == "powerlog":
            params["mu4"] = 1.0 if args.mu4 is None else args.mu4
        elif args.mu4 is not None:
            parser.error("--mu4 only applies to --family powerlog")
        return symbols.make_symbol(fam, **params)
    if args.config:
        return load_config(args.config).symbol
    parser.error("a symbol is required: give --family or --config")


def _float_list(parser, text, flag):
    try:
        values = [float(tok) for tok in text.replace(",", " ").split()]
    except ValueError:
        parser.error(f"{flag}: expected a list of numbers, got {text!r}")
    if not values:
        parser.error(f"{flag}: empty list")
    return values


def _write_with_manifest(out_path, texts, settings, seed, started):
    """texts: {path: content}; manifest sits next to out_path and lists all files."""
    for path, content in texts.items():
        with open(path, "w") as fh:
            fh.write(content)
    doc = manifest.build_manifest(settings, seed, sorted(texts), started)
    manifest.write_manifest(manifest.manifest_path_for(out_path), doc)


def _cmd_admissibility(parser, args):
    started = manifest.utc_now()
    spec = _resolve_symbol(parser, args)
    horizons = None
    tol = args.tol
    cap = args.mikhlin_cap
    if args.config:
        cfg = load_config(args.config)
        horizons = cfg.horizons
        tol = cfg.adm_tol if tol is None else tol
        cap = cfg.mikhlin_cap if cap is None else cap
    if args.horizons is not None:
        horizons = _float_list(parser, args.horizons, "--T")
    if horizons is None:
        horizons = [1.0]
    tol = 1e-8 if tol is None else tol
    cap = 64.0 if cap is None else cap

    reports = adm.assess_many(spec, horizons, tol=tol, mikhlin_cap=cap)
    csv_text = adm.reports_to_csv(reports)
    sys.stdout.write(csv_text)
    for rep in reports:
        print(
            f"# T={rep.horizon:g}: {rep.verdict.value} "
            f"(mikhlin {rep.mikhlin.order1:.3g}/{rep.mikhlin.order2:.3g}, "
            f"monotone={rep.monotone})",
            file=sys.stderr,
        )
    if args.out:
        settings = {
            "command": "admissibility",
            "symbol": spec.label(),
            "horizons": horizons,
            "tol": tol,
            "mikhlin_cap": cap,
        }
        _write_with_manifest(args.out, {args.out: csv_text}, settings, None, started)

    verdicts = {rep.verdict for rep in reports}
    if adm.Verdict.DIVERGENT in verdicts:
        return EXIT_DIVERGENT
    if adm.Verdict.INCONCLUSIVE in verdicts:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _t_grid(args):
    if args.t_min <= 0 or args.t_max < args.t_min or args.t_points < 2:
        raise ParameterError("need 0 < t-min <= t-max and at least 2 t-points")
    return np.logspace(math.log10(args.t_min), math.log10(args.t_max), args.t_points)


def _scan_csv(scan):
    lines = ["t,I,ratio"]
    for t, val, ratio in zip(scan.t, scan.values, scan.ratios):
        lines.append(f"{t:.17g},{val:.17g},{ratio:.17g}")
    return "\n".join(lines) + "\n"


def _emit_kernel(args, csv_text, summary, settings, started):
    if csv_text is not None:
        sys.stdout.write(csv_text)
    print(json.dumps(summary, sort_keys=True))
    if args.out:
        texts = {}
        if csv_text is not None:
            texts[args.out] = csv_text
        base = args.out.rsplit(".", 1)[0]
        texts[base + ".summary.json"] = json.dumps(summary, sort_keys=True, indent=2) + "\n"
        _write_with_manifest(args.out, texts, settings, None, started)
    return EXIT_OK if summary["pass"] else EXIT_INCONCLUSIVE


def _cmd_kernel(parser, args):
    started = manifest.utc_now()
    spec = _resolve_symbol(parser, args)
    settings = {"command": "kernel", "check": args.check, "symbol": spec.label()}

    if args.check == "21":
        if args.s is None or args.k is None:
            parser.error("check 21 requires --s and --k")
        tol = 1e-7 if args.tol is None else args.tol
        scan = kernel_analysis.moment_ratio_scan(
            spec, args.s, args.k,
            t_min=args.t_min, t_max=args.t_max, points=args.t_points,
            tol=tol, cap=args.cap,
        )
        summary = {
            "spec": spec.label(),
            "s": args.s,
            "k": args.k,
            "ratio_spread": scan.spread,
            "pass": bool(scan.passed),
        }
        settings.update(s=args.s, k=args.k, tol=tol, cap=args.cap)
        return _emit_kernel(args, _scan_csv(scan), summary, settings, started)

    if args.check == "22":
        s = 1.0 if args.s is None else args.s
        tol = 1e-8 if args.tol is None else args.tol
        rows = []
        hs_ratios = []
        linf_ratios = []
        for t in _t_grid(args):
            hs = kernel_analysis.kernel_hs_norm(spec, s, t, tol=tol)
            linf = kernel_analysis.kernel_linf(spec, t, tol=tol)
            scale = t * float(spec.g(adm.threshold_wavenumber(spec, t)))
            hs_ratios.append(hs * scale ** ((s + 1.0) / 2.0))
            linf_ratios.append(linf * 4.0 * math.pi * scale)
            rows.append(
                f"{t:.17g},{hs:.17g},{hs_ratios[-1]:.17g},{linf:.17g},{linf_ratios[-1]:.17g}"
            )
        hs_spread = max(hs_ratios) / min(hs_ratios)
        linf_spread = max(linf_ratios) / min(linf_ratios)
        csv_text = "t,hs,hs_ratio,linf,linf_ratio\n" + "\n".join(rows) + "\n"
        summary = {
            "spec": spec.label(),
            "s": s,
            "hs_ratio_spread": hs_spread,
            "linf_ratio_spread": linf_spread,
            "pass": bool(hs_spread <= args.cap and linf_spread <= args.cap),
        }
        settings.update(s=s, tol=tol, cap=args.cap)
        return _emit_kernel(args, csv_text, summary, settings, started)

    if args.check == "23":
        tol = 1e-8 if args.tol is None else args.tol
        rows = []
        ratios = []
        for t in _t_grid(args):
            comp = kernel_analysis.hessian_bound_components(spec, t, tol=tol)
            ratios.append(comp.product_ratio)
            rows.append(
                f"{t:.17g},{comp.l2_part:.17g},{comp.hess_part:.17g},{comp.product_ratio:.17g}"
            )
        spread = max(ratios) / min(ratios)
        csv_text = "t,l2_part,hess_part,product_ratio\n" + "\n".join(rows) + "\n"
        summary = {
            "spec": spec.label(),
            "ratio_spread": spread,
            "pass": bool(spread <= args.cap),
        }
        settings.update(tol=tol, cap=args.cap)
        return _emit_kernel(args, csv_text, summary, settings, started)

    # check 24: time-integral identity at one horizon
    gap_tol = 1e-4 if args.tol is None else args.tol
    chk = kernel_analysis.decay_time_integral_identity(
        spec, args.horizon, tol=min(gap_tol / 10.0, 1e-6)
    )
    summary = {
        "spec": spec.label(),
        "T": args.horizon,
        "lhs": chk.lhs,
        "rhs": chk.rhs,
        "rel_gap": chk.rel_gap,
        "tol": gap_tol,
        "pass": bool(chk.rel_gap <= gap_tol),
    }
    settings.update(T=args.horizon, tol=gap_tol)
    return _emit_kernel(args, None, summary, settings, started)


def _cmd_simulate(parser, args):
    started = manifest.utc_now()
    preset_params: dict = {}
    settings: dict = {"command": "simulate"}
    if args.config:
        cfg = load_config(args.config)
        grid, sc = cfg.grid, cfg.solver
        preset, preset_params = cfg.preset, dict(cfg.preset_params)
        settings["config"] = cfg.raw
    else:
        if not args.family:
            parser.error("simulate needs --config or --family")
        spec = _resolve_symbol(parser, args)
        grid = Grid(args.n, args.box_length)
        sc = SolverConfig(grid=grid, symbol=spec, t_end=1.0)
        preset = "orszag-tang"

    # explicit flags override the config file
    from dataclasses import replace

    overrides = {}
    for name, value in (
        ("t_end", args.t_end), ("dt", args.dt), ("cfl", args.cfl),
        ("stride", args.stride), ("hs_order", args.hs_order),
        ("oversample", args.oversample), ("seed", args.seed),
    ):
        if value is not None:
            overrides[name] = value
    if args.linear:
        overrides["nonlinear"] = False
    if args.filter:
        overrides["filter_enabled"] = True
    if overrides:
        sc = replace(sc, **overrides)
    if args.preset:
        preset = args.preset
        preset_params = {}
    if preset.strip().lower() == "random-band":
        if args.seed is not None:
            preset_params["seed"] = args.seed
        preset_params.setdefault("seed", sc.seed)

    if args.snapshot_in:
        n, box, u0, b0, t0, step0 = read_snapshot(args.snapshot_in)
        if n != grid.n or abs(box - grid.box_length) > 1e-12 * box:
            raise GridMismatchError(
                f"snapshot grid {n}/{box:g} differs from configured {grid.n}/{grid.box_length:g}"
            )
        init = State(u=u0, b=b0, t=t0, step=step0)
        settings["initial"] = "snapshot"
    else:
        u0, b0 = presets.make_initial(preset, grid, **preset_params)
        init = State(u=u0, b=b0)
        settings["initial"] = preset

    settings.update(
        symbol=sc.symbol.label(), n=grid.n, box_length=grid.box_length,
        t_end=sc.t_end, dt=sc.dt, cfl=sc.cfl, nonlinear=sc.nonlinear,
        filter=sc.filter_enabled, stride=sc.stride, hs_order=sc.hs_order,
        oversample=sc.oversample,
    )

    try:
        final, ledger = run(sc, init)
    except InstabilityError as exc:
        print(f"instability: {exc}", file=sys.stderr)
        if args.ledger and exc.ledger is not None and len(exc.ledger):
            exc.ledger.write_csv(args.ledger)
            print(f"partial ledger written to {args.ledger}", file=sys.stderr)
        if args.snapshot_out and exc.state is not None:
            write_snapshot(
                args.snapshot_out, grid.n, grid.box_length,
                exc.state.u, exc.state.b, exc.state.t, exc.state.step,
            )
            print(f"diagnostic snapshot written to {args.snapshot_out}", file=sys.stderr)
        return EXIT_INSTABILITY

    outputs = []
    if args.ledger:
        ledger.write_csv(args.ledger)
        outputs.append(args.ledger)
    if args.snapshot_out:
        write_snapshot(
            args.snapshot_out, grid.n, grid.box_length, final.u, final.b, final.t, final.step
        )
        outputs.append(args.snapshot_out)
    if outputs:
        doc = manifest.build_manifest(settings, sc.seed, outputs, started)
        manifest.write_manifest(manifest.manifest_path_for(outputs[0]), doc)

    names = ("l2u2", "l2b2", "dissint", "eres", "divu", "divb")
    tail = " ".join(f"{n}={ledger.series(n)[-1]:.17g}" for n in names)
    print(f"final t={final.t:.17g} steps={final.step} {tail}")
    summ = diagnostics.monitor(ledger)
    print(
        f"monitor sup_b_linf={summ.sup_b_linf:.17g} "
        f"j_linf_l2t={summ.j_linf_l2t:.17g} "
        f"grad_j_linf_l1t={summ.grad_j_linf_l1t:.17g} "
        f"sup_omega_linf={summ.sup_omega_linf:.17g} "
        f"grad_b_linf_l2t={summ.grad_b_linf_l2t:.17g}"
    )
    raised = sorted(k for k, v in summ.growth_flags.items() if v)
    print("growth flags: " + (",".join(raised) if raised else "none"))
    return EXIT_OK


def _cmd_verify(parser, args):
    results, all_ok = verify.run_checks(only=args.only, inject_failure=args.inject_failure)
    if not results:
        print(f"no checks match --only {args.only!r}", file=sys.stderr)
        return EXIT_USAGE
    width = max(len(name) for name, _, _ in results)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name:<{width}}  {detail}")
    n_fail = sum(1 for _, ok, _ in results if not ok)
    print(f"{len(results) - n_fail}/{len(results)} checks passed")
    return EXIT_OK if all_ok else 1


def build_parser() -> _Parser:
    parser = _Parser(prog="gmhd", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"gmhd {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("admissibility", help="certify a diffusion symbol over horizons")
    _add_symbol_args(p)
    p.add_argument("--T", dest="horizons", metavar="LIST", help="horizons, e.g. '1,8,64'")
    p.add_argument("--tol", type=float, help="relative tolerance for the growth integral")
    p.add_argument("--mikhlin-cap", type=float, help="cap for the derivative ratio suprema")
    p.add_argument("--out", metavar="CSV", help="write the report table (with a manifest)")
    p.set_defaults(func=_cmd_admissibility)

    p = sub.add_parser("kernel", help="semigroup kernel estimates and scans")
    _add_symbol_args(p)
    p.add_argument(
        "--lemma", dest="check", required=True, choices=["21", "22", "23", "24"],
        help="which estimate to exercise: 21 moment ratios, 22 smoothing norms, "
             "23 second-derivative mass, 24 decay time integral",
    )
    p.add_argument("--s", type=float, help="radial weight exponent")
    p.add_argument("--k", type=float, help="symbol power in the moment")
    p.add_argument("--t-min", type=float, default=1e-3)
    p.add_argument("--t-max", type=float, default=1e3)
    p.add_argument("--t-points", type=int, default=9)
    p.add_argument("--T", dest="horizon", type=float, default=1.0, help="horizon for check 24")
    p.add_argument("--tol", type=float, help="tolerance (quadrature, or gap for check 24)")
    p.add_argument("--cap", type=float, default=50.0, help="allowed ratio spread")
    p.add_argument("--out", metavar="CSV", help="write the scan table (with a manifest)")
    p.set_defaults(func=_cmd_kernel)

    p = sub.add_parser("simulate", help="advance the coupled system and record diagnostics")
    _add_symbol_args(p)
    p.add_argument("--n", type=int, default=64, help="grid points per side (no --config)")
    p.add_argument("--box-length", type=float, default=2.0 * math.pi)
    p.add_argument("--preset", choices=sorted(presets.PRESETS), help="initial condition")
    p.add_argument("--t-end", type=float, help="duration to advance from the initial state")
    p.add_argument("--dt", type=float, help="fixed step (default: CFL-chosen)")
    p.add_argument("--cfl", type=float)
    p.add_argument("--stride", type=int, help="steps between ledger rows")
    p.add_argument("--hs-order", type=float)
    p.add_argument("--oversample", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--linear", action="store_true", help="drop the nonlinear terms")
    p.add_argument("--filter", action="store_true", help="enable the exponential filter")
    p.add_argument("--snapshot-in", metavar="PATH", help="resume from a field snapshot")
    p.add_argument("--snapshot-out", metavar="PATH", help="write the final (or diverged) state")
    p.add_argument("--ledger", metavar="CSV", help="write the diagnostics table")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("verify", help="run the built-in property checks")
    p.add_argument("--only", metavar="SUBSTR", help="run only checks whose name contains this")
    p.add_argument(
        "--inject-failure", action="store_true",
        help="append a deliberately failing check (exercises failure reporting)",
    )
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(parser, args)
    except ToleranceError as exc:
        print(f"gmhd: tolerance not met: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except InstabilityError as exc:
        print(f"gmhd: {exc}", file=sys.stderr)
        return EXIT_INSTABILITY
    except GmhdError as exc:
        print(f"gmhd: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except OSError as exc:
        print(f"gmhd: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
