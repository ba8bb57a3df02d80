"""Horizon thresholds and the admissibility growth integral.

For a horizon T the threshold wavenumber is the unique root of
``r^2 g(r) = 1/T`` (the multiplier is strictly increasing).  The growth
integral ``integral_{A}^{inf} dr / (r g(r))`` decides the verdict: finite
means the symbol damps fast enough for the a-priori machinery to close on
[0, T]; infinite (Constant and too-flat log families) means it does not.

The integral is computed after substituting r = A e^u, which turns it into
``integral_0^inf du / g(A e^u)``.  Each family supplies an analytic tail for
large u; no finite computation proves divergence, so divergent verdicts rest
on family-exact arguments plus a two-decade saturation test, and exhausted
budgets surface as Inconclusive rather than a guess.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import integrate

from .errors import BracketError, ParameterError
from .symbols import (
    Constant,
    LogLogLog,
    LogPower,
    MikhlinReport,
    Power,
    PowerLog,
    Symbol,
    Tabulated,
    check_mikhlin,
    monotonicity_check,
)

_MAX_BRACKET_STEPS = 2000
_MAX_BISECT_STEPS = 200
_ASYMPTOTIC_LN_R = 45.0
_MAX_EVAL_LN_R = 680.0
_SATURATION_FACTOR = 1.5


class Verdict(str, Enum):
    ADMISSIBLE = "Admissible"
    DIVERGENT = "Divergent"
    INCONCLUSIVE = "Inconclusive"


def threshold_wavenumber(spec: Symbol, horizon: float) -> float:
    """Root of m(x) = 1/T by bracketed bisection (monotone, no derivatives)."""
    if not (horizon > 0) or not np.isfinite(horizon):
        raise ParameterError(f"horizon must be positive and finite, got {horizon!r}")
    target = 1.0 / horizon

    def f(x):
        return spec.multiplier(x) - target

    lo = hi = 1.0
    f1 = f(1.0)
    if f1 == 0.0:
        return 1.0
    if f1 < 0.0:
        hi = 2.0
        for _ in range(_MAX_BRACKET_STEPS):
            if f(hi) >= 0.0:
                break
            lo = hi
            hi *= 2.0
        else:
            raise BracketError(f"could not bracket threshold above x=1 for {spec!r}")
    else:
        lo = 0.5
        for _ in range(_MAX_BRACKET_STEPS):
            if f(lo) <= 0.0:
                break
            hi = lo
            lo *= 0.5
        else:
            raise BracketError(f"could not bracket threshold below x=1 for {spec!r}")

    for _ in range(_MAX_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if fm < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class IntegralResult:
    """Value and bookkeeping for the growth integral from a lower radius."""

    value: float
    error_estimate: float
    tail_limit: float
    status: str  # "converged" | "divergent" | "inconclusive"


def _phi_factory(spec, lnA):
    """Integrand 1/g(A e^u) with overflow-safe radius formation."""

    def phi(u):
        return 1.0 / spec.g(math.exp(u + lnA))

    return phi


def saturation_ratio(spec: Symbol, r_lower: float, span: float = 100.0) -> float:
    """g growth factor across two decades of the substitution variable.

    A ratio close to 1 means the integrand of the growth integral does not
    decay at all (g is numerically bounded), which forces divergence.
    """
    lnA = math.log(r_lower)
    u0 = 1.0
    lo = spec.g(math.exp(min(u0 + lnA, _MAX_EVAL_LN_R)))
    hi = spec.g(math.exp(min(u0 * span + lnA, _MAX_EVAL_LN_R)))
    return hi / lo


def _tail_term(spec, lnA, U):
    """(value, error_bound) of the tail integral beyond U, or None.

    Valid once U is past the family's asymptotic threshold; every formula
    below is exact for the asymptotic integrand, with the replacement error
    folded into the bound.
    """
    v = U + lnA  # = ln of the radius at the truncation point
    if isinstance(spec, Power):
        mu = spec.mu1
        val = math.exp(-mu * v) / mu
        return val, 4e-16 * val
    if isinstance(spec, PowerLog):
        a, b = spec.mu3, spec.mu4
        if v <= 1.0:
            return None
        log_val = -a * v - b * math.log(v) - math.log(a)
        val = math.exp(log_val)
        # one integration by parts shows the flat-log-factor bound is within
        # a relative b/(a*v) of the true tail
        return val, val * (b / (a * v) + 4e-16)
    if isinstance(spec, LogPower):
        mu = spec.mu2
        if mu <= 1.0 or v <= 1.0:
            return None
        val = v ** (1.0 - mu) / (mu - 1.0)
        return val, val * (mu * math.exp(-min(v, 600.0)) + 4e-16)
    if isinstance(spec, LogLogLog):
        mu = spec.mu5
        if mu <= 1.0 or v <= math.e:
            return None
        # tail = int_v^inf dx / (x log1p(x)^mu); quadrature in w = ln x up to
        # w = 40, beyond which log1p(e^w) = w to machine precision
        w_lo = math.log(v)
        w_hi = 40.0
        if w_lo < w_hi:
            part, perr = integrate.quad(
                lambda w: np.log1p(np.exp(w)) ** (-mu), w_lo, w_hi, limit=200
            )
        else:
            part, perr = 0.0, 0.0
            w_hi = w_lo
        closed = w_hi ** (1.0 - mu) / (mu - 1.0)
        val = part + closed
        return val, perr + closed * (mu * math.exp(-w_hi) + 4e-16)
    if isinstance(spec, Tabulated) and spec.unbounded():
        R = math.exp(min(v, _MAX_EVAL_LN_R))
        rK = spec.knots_r[-1]
        if R < 2.0 * rK:
            return None
        s = spec.last_slope
        q = spec.knots_g[-1] - s * rK
        if q == 0.0:
            val = 1.0 / (s * R)
        else:
            val = math.log1p(q / (s * R)) / q
        return val, 4e-16 * abs(val)
    return None


def _family_min_u(spec, lnA):
    if isinstance(spec, (Power, PowerLog)):
        return max(8.0, 2.0 - lnA)
    if isinstance(spec, (LogPower, LogLogLog)):
        return max(8.0, _ASYMPTOTIC_LN_R - lnA)
    if isinstance(spec, Tabulated):
        return max(8.0, math.log(max(2.0 * spec.knots_r[-1], 1e-300)) - lnA + 1.0)
    return 8.0


def _known_divergent(spec):
    if isinstance(spec, Constant):
        return True
    if isinstance(spec, LogPower) and spec.mu2 <= 1.0:
        return True
    if isinstance(spec, LogLogLog) and spec.mu5 <= 1.0:
        return True
    if isinstance(spec, Tabulated) and not spec.unbounded():
        return True
    return False


def growth_integral_from(spec: Symbol, r_lower: float, tol: float = 1e-8) -> IntegralResult:
    """Growth integral from radius r_lower upward, with verdict status.

    tol is relative; the reported error estimate is relative as well.
    """
    if not (r_lower > 0) or not np.isfinite(r_lower):
        raise ParameterError(f"r_lower must be positive, got {r_lower!r}")
    if not (0 < tol < 1):
        raise ParameterError("tol must be in (0, 1)")
    lnA = math.log(r_lower)

    if _known_divergent(spec):
        return IntegralResult(math.inf, math.nan, math.nan, "divergent")
    # backstop for symbols without an analytic classification: a flat g
    # across two decades of u means the integrand never decays
    if saturation_ratio(spec, r_lower) < _SATURATION_FACTOR:
        return IntegralResult(math.inf, math.nan, math.nan, "divergent")
    if not isinstance(spec, (Power, PowerLog, LogPower, LogLogLog, Tabulated)):
        return IntegralResult(math.nan, math.nan, math.nan, "inconclusive")

    phi = _phi_factory(spec, lnA)
    U = _family_min_u(spec, lnA)
    tail = _tail_term(spec, lnA, U)
    attempts = 0
    while tail is None and attempts < 60:
        U *= 2.0
        tail = _tail_term(spec, lnA, U)
        attempts += 1
    if tail is None:
        return IntegralResult(math.nan, math.nan, U, "inconclusive")

    # rough size so the tail error test can be made relative
    rough, _ = integrate.quad(phi, 0.0, U, epsrel=1e-4, limit=200)
    scale = rough + tail[0]
    while tail[1] > 0.25 * tol * scale:
        if U + lnA >= _MAX_EVAL_LN_R or attempts >= 60:
            best = rough + tail[0]
            return IntegralResult(best, (tail[1] / best) if best else math.nan, U, "inconclusive")
        U = min(2.0 * U, _MAX_EVAL_LN_R - lnA)
        tail = _tail_term(spec, lnA, U)
        attempts += 1

    epsrel = max(tol / 4.0, 5e-14)
    pieces = [0.0, min(2.0, U)]
    if U > 2.0:
        pieces.append(U)
    bulk = 0.0
    bulk_err = 0.0
    for a, b in zip(pieces[:-1], pieces[1:]):
        val, err = integrate.quad(phi, a, b, epsrel=epsrel, epsabs=0.0, limit=400)
        bulk += val
        bulk_err += err
    value = bulk + tail[0]
    rel_err = (bulk_err + tail[1]) / value if value > 0 else math.nan
    status = "converged" if rel_err <= tol else "inconclusive"
    return IntegralResult(value, rel_err, U, status)


def admissibility_integral(spec: Symbol, horizon: float, tol: float = 1e-8) -> IntegralResult:
    """Growth integral from the horizon's threshold wavenumber."""
    return growth_integral_from(spec, threshold_wavenumber(spec, horizon), tol=tol)


@dataclass(frozen=True)
class AdmissibilityReport:
    symbol_label: str
    horizon: float
    threshold: float
    integral: float
    error_estimate: float
    tail_limit: float
    verdict: Verdict
    mikhlin: MikhlinReport
    monotone: bool


def assess(
    spec: Symbol,
    horizon: float,
    tol: float = 1e-8,
    mikhlin_cap: float = 64.0,
) -> AdmissibilityReport:
    """Full admissibility verdict for one horizon.

    Admissible requires a convergent growth integral within tol plus the
    sampled smoothness (Mikhlin) and monotonicity checks; a divergent
    integral is Divergent regardless; anything else is Inconclusive.
    """
    threshold = threshold_wavenumber(spec, horizon)
    result = growth_integral_from(spec, threshold, tol=tol)
    mik = check_mikhlin(spec, cap=mikhlin_cap)
    mono = monotonicity_check(spec)
    if result.status == "divergent":
        verdict = Verdict.DIVERGENT
    elif result.status == "converged" and mik.passed and mono:
        verdict = Verdict.ADMISSIBLE
    else:
        verdict = Verdict.INCONCLUSIVE
    return AdmissibilityReport(
        symbol_label=spec.label(),
        horizon=float(horizon),
        threshold=threshold,
        integral=result.value,
        error_estimate=result.error_estimate,
        tail_limit=result.tail_limit,
        verdict=verdict,
        mikhlin=mik,
        monotone=mono,
    )


def assess_many(spec: Symbol, horizons, tol: float = 1e-8, mikhlin_cap: float = 64.0):
    """Assess a batch of horizons; GMHD_THREADS > 1 enables a worker pool.

    Results are returned in input order either way.
    """
    horizons = list(horizons)
    workers = 0
    raw = os.environ.get("GMHD_THREADS", "").strip()
    if raw:
        try:
            workers = int(raw)
        except ValueError:
            workers = 0
    if workers > 1 and len(horizons) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda T: assess(spec, T, tol=tol, mikhlin_cap=mikhlin_cap), horizons))
    return [assess(spec, T, tol=tol, mikhlin_cap=mikhlin_cap) for T in horizons]


REPORT_CSV_HEADER = "T,A_T,C_T,verdict,err_estimate"


def reports_to_csv(reports) -> str:
    """Render reports as CSV rows under the fixed header."""
    lines = [REPORT_CSV_HEADER]
    for rep in reports:
        lines.append(
            f"{rep.horizon:.17g},{rep.threshold:.17g},{rep.integral:.17g},"
            f"{rep.verdict.value},{rep.error_estimate:.17g}"
        )
    return "\n".join(lines) + "\n"
