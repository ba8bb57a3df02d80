"""Structure checks and a-priori quantity monitoring.

The discrete sanity checks mirror the identities the energy method rests on:
the two advective cancellations, the equivalence of the velocity/magnetic
formulation with its vorticity/current counterpart (including the strain
coupling term), and the interpolation chain bounding ||grad b||_inf.  All of
them should sit at round-off for divergence-free band-limited fields.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ZeroFieldError
from .solver import Ledger
from .spectral import Grid, hdot_norm, l2_norm, l4_norm, linf_norm

_EPS = 1e-300
_trapz = getattr(np, "trapezoid", None) or np.trapz


def _inner(grid: Grid, a, b) -> float:
    """L2 pairing of spectral fields (scalar or matching vector)."""
    return grid.box_length ** 2 * float(np.real(np.sum(a * np.conj(b))))


def cancellation_residuals(grid: Grid, u, b) -> tuple[float, float]:
    """Normalized defects of the two advective cancellation identities.

    First: <(b.grad)b, u> + <(b.grad)u, b> = 0, the coupling that drops out
    of the total energy balance.  Second, at the vorticity/current level:
    <(b.grad)j, omega> + <(b.grad)omega, j> = 0.  Both are exact for
    divergence-free trig polynomials, so the returned values are pure
    round-off.  Zero fields return exactly 0.
    """
    grid.check_vector(u)
    grid.check_vector(b)
    i1 = _inner(grid, grid.advect(b, b), u)
    i2 = _inner(grid, grid.advect(b, u), b)
    vel = abs(i1 + i2) / (l4_norm(grid, b) ** 2 * hdot_norm(grid, u, 1.0) + _EPS)

    omega = grid.curl(u)
    j = grid.curl(b)
    i3 = _inner(grid, grid.advect(b, j), omega)
    i4 = _inner(grid, grid.advect(b, omega), j)
    cur = abs(i3 + i4) / (
        l4_norm(grid, b) * l4_norm(grid, omega) * hdot_norm(grid, j, 1.0) + _EPS
    )
    return vel, cur


def strain_coupling(grid: Grid, u, b):
    """Spectral coefficients of the strain term feeding the current equation:

        2 d1b1 (d2u1 + d1u2) - 2 d1u1 (d2b1 + d1b2),

    with all products dealiased.
    """
    kx, ky = grid.kx, grid.ky
    d1b1 = 1j * kx * b[0]
    d1u1 = 1j * kx * u[0]
    su = 1j * (ky * u[0] + kx * u[1])
    sb = 1j * (ky * b[0] + kx * b[1])
    return 2.0 * (grid.product(d1b1, su) - grid.product(d1u1, sb))


def vorticity_current_residual(grid: Grid, u, b) -> float:
    """Relative defect between the curl of the induction nonlinearity and the
    current-equation right-hand side (advection swap plus strain coupling).

    Both sides are assembled with the same dealiased products, so for
    divergence-free inputs the residual is round-off.
    """
    grid.check_vector(u)
    grid.check_vector(b)
    omega = grid.curl(u)
    j = grid.curl(b)
    lhs = grid.curl(grid.advect(b, u) - grid.advect(u, b))
    rhs = grid.advect(b, omega) - grid.advect(u, j) + strain_coupling(grid, u, b)
    scale = l2_norm(grid, rhs)
    diff = l2_norm(grid, lhs - rhs)
    if scale == 0.0:
        return diff
    return diff / scale


def interpolation_chain_ratio(grid: Grid, b) -> float:
    """||grad b||_inf / (||grad b||_L2^(1/2) ||grad j||_inf^(1/2)).

    The pointwise magnitude of grad b is Frobenius; for divergence-free
    fields ||grad b||_L2 equals ||j||_L2 and is computed that way.
    """
    grid.check_vector(b)
    j = grid.curl(b)
    gb = np.concatenate([grid.grad(b[0]), grid.grad(b[1])])
    num = linf_norm(grid, gb)
    den_l2 = l2_norm(grid, j)
    den_inf = linf_norm(grid, grid.grad(j))
    if den_l2 <= 0 or den_inf <= 0:
        raise ZeroFieldError("interpolation chain needs a nonzero magnetic field")
    return num / np.sqrt(den_l2 * den_inf)


def energy_residual(ledger: Ledger) -> float:
    """Worst recorded defect of the discrete energy balance."""
    return float(np.max(ledger.series("eres")))


@dataclass(frozen=True)
class MonitorSummary:
    """The five a-priori quantities whose finiteness propagates regularity.

    Each scalar is the time-global norm the estimates bound; each series is
    the instantaneous quantity at the recorded times.  grad_b_linf_l2t is
    None when the ledger came from a CSV (that series is in-memory only).
    """

    sup_b_linf: float
    j_linf_l2t: float
    grad_j_linf_l1t: float
    sup_omega_linf: float
    grad_b_linf_l2t: float | None
    times: np.ndarray
    series: dict
    growth_flags: dict


def _flag_growth(t, series) -> bool:
    """Doubling across the final quarter of the run flags unbounded growth."""
    if len(t) < 4 or t[-1] <= t[0]:
        return False
    t0, t1 = t[0], t[-1]
    half = series[(t >= t0 + 0.50 * (t1 - t0)) & (t <= t0 + 0.75 * (t1 - t0))]
    last = series[t >= t0 + 0.75 * (t1 - t0)]
    if half.size == 0 or last.size == 0:
        return False
    base = float(np.max(half))
    peak = float(np.max(last))
    return peak >= 2.0 * base and peak > 0.0


def monitor(ledger: Ledger) -> MonitorSummary:
    """Reduce a ledger to the five monitored a-priori quantities."""
    t = ledger.series("t")
    blinf = ledger.series("blinf")
    jlinf = ledger.series("jlinf")
    gjlinf = ledger.series("gjlinf")
    omlinf = ledger.series("omlinf")
    gradblinf = ledger.series("gradblinf")
    have_gradb = not np.any(np.isnan(gradblinf))
    series = {
        "blinf": blinf,
        "jlinf": jlinf,
        "gjlinf": gjlinf,
        "omlinf": omlinf,
        "gradblinf": gradblinf,
    }
    flags = {name: _flag_growth(t, s) for name, s in series.items() if not np.any(np.isnan(s))}
    return MonitorSummary(
        sup_b_linf=float(np.max(blinf)),
        j_linf_l2t=float(np.sqrt(_trapz(jlinf ** 2, t))) if len(t) > 1 else 0.0,
        grad_j_linf_l1t=float(_trapz(gjlinf, t)) if len(t) > 1 else 0.0,
        sup_omega_linf=float(np.max(omlinf)),
        grad_b_linf_l2t=(
            float(np.sqrt(_trapz(gradblinf ** 2, t))) if have_gradb and len(t) > 1 else None
        ),
        times=t,
        series=series,
        growth_flags=flags,
    )


_TABLE_QUANTITIES = (
    ("sup_t ||b||_inf", "sup_b_linf"),
    ("||j||_inf in L2_t", "j_linf_l2t"),
    ("int ||grad j||_inf dt", "grad_j_linf_l1t"),
    ("sup_t ||omega||_inf", "sup_omega_linf"),
    ("||grad b||_inf in L2_t", "grad_b_linf_l2t"),
)


def comparison_table(labeled_ledgers: dict[str, Ledger]) -> str:
    """Side-by-side monitored quantities plus the grad-j growth series.

    Exploratory output: rows report, they do not judge.
    """
    summaries = {label: monitor(led) for label, led in labeled_ledgers.items()}
    labels = list(summaries)
    width = max(24, *(len(lb) + 2 for lb in labels))
    lines = []
    header = f"{'quantity':<28}" + "".join(f"{lb:>{width}}" for lb in labels)
    lines.append(header)
    lines.append("-" * len(header))
    for title, attr in _TABLE_QUANTITIES:
        cells = []
        for lb in labels:
            val = getattr(summaries[lb], attr)
            cells.append(f"{val:>{width}.6g}" if val is not None else f"{'n/a':>{width}}")
        lines.append(f"{title:<28}" + "".join(cells))
    lines.append("")
    lines.append("cumulative int ||grad j||_inf dt at matched times:")
    ref = summaries[labels[0]]
    t_ref = ref.times
    cums = {}
    for lb in labels:
        s = summaries[lb]
        cum = np.concatenate(
            [[0.0], np.cumsum(0.5 * (s.series["gjlinf"][1:] + s.series["gjlinf"][:-1]) * np.diff(s.times))]
        )
        cums[lb] = (s.times, cum)
    picks = np.linspace(0, len(t_ref) - 1, min(9, len(t_ref))).astype(int)
    lines.append(f"{'t':<28}" + "".join(f"{lb:>{width}}" for lb in labels))
    for i in picks:
        t = t_ref[i]
        row = [f"{t:<28.6g}"]
        for lb in labels:
            ts, cum = cums[lb]
            row.append(f"{np.interp(t, ts, cum):>{width}.6g}")
        lines.append("".join(row))
    return "\n".join(lines) + "\n"
