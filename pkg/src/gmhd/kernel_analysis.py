"""Numerical checks of the diffusion kernel estimates.

The kernel at time t has transform exp(-t m(|xi|)) with m(r) = r^2 g(r).
Everything here reduces to radial moments

    J(p, k, tau) = integral_0^inf r^p g(r)^k exp(-tau m(r)) dr,

computed by adaptive quadrature split at the threshold radius where
tau * m = 1, plus a rigorous truncation bound: beyond R the factor
g^k exp(-tau m / 2) is at most (2k/(e tau r^2))^k and the remaining
exponential is at most exp(-(tau/2) g(R) r^2), which integrates to an upper
incomplete gamma in closed form.

Fourier convention, fixed package-wide: forward transform integral
e^{-i x.xi} h dx with no prefactor, inverse carrying (2 pi)^-2.  Under it the
kernel peak is (2 pi)^-1 J(1, 0, t) and squared Sobolev norms are
(2 pi)^-2 * moment integrals.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import BracketError, ParameterError, ToleranceError, ZeroFieldError
from .admissibility import growth_integral_from, threshold_wavenumber
from .symbols import Symbol


def _radial_moment(spec, p, k, tau, tol):
    """J(p, k, tau) with a relative error estimate; raises if tol unmet."""
    if not (tau > 0) or not np.isfinite(tau):
        raise ParameterError(f"need a positive finite time, got {tau!r}")
    if k < 0:
        raise ParameterError("g-power k must be >= 0")
    a = 0.5 * (p - 2.0 * k + 1.0)
    if a <= 0:
        raise ParameterError(
            f"moment indices out of range (need s > k - 1): p={p}, k={k}"
        )

    def integrand(r):
        if r == 0.0:
            return 0.0 if p > 0 else math.inf
        gv = spec.g(r)
        return r ** p * gv ** k * math.exp(-tau * r * r * gv)

    ck = 1.0 if k == 0 else (2.0 * k / (math.e * tau)) ** k

    def tail_bound(R):
        beta = 0.5 * tau * spec.g(R)
        x = beta * R * R
        return ck * 0.5 * beta ** (-a) * special.gamma(a) * special.gammaincc(a, x)

    split = threshold_wavenumber(spec, tau)
    R = 2.0 * split
    rough, _ = integrate.quad(integrand, 0.0, R, epsrel=1e-3, limit=200)
    scale = abs(rough) + tail_bound(R)
    for _ in range(200):
        tb = tail_bound(R)
        if tb <= 0.25 * tol * scale:
            break
        R *= 2.0
    else:
        raise ToleranceError(f"truncation bound stalled for {spec!r}", achieved=None)

    # QUADPACK's reported abserr is conservative by an order of magnitude,
    # so request well below tol to keep the estimate under the promise
    epsrel = max(tol / 40.0, 5e-14)
    lo, lo_err = integrate.quad(integrand, 0.0, split, epsrel=epsrel, epsabs=0.0, limit=400)
    hi, hi_err = integrate.quad(integrand, split, R, epsrel=epsrel, epsabs=0.0, limit=400)
    value = lo + hi
    if value <= 0:
        raise ToleranceError(f"vanishing moment integral for {spec!r}", achieved=None)
    rel = (lo_err + hi_err + tail_bound(R)) / value
    # the pre-quadrature radius used a loose scale guess; with the true value
    # in hand, extend the truncation until its bound stops dominating
    extra = 0
    while rel > tol and tail_bound(R) > lo_err + hi_err and extra < 40:
        add, add_err = integrate.quad(integrand, R, 2.0 * R, epsrel=epsrel, epsabs=0.0, limit=400)
        hi += add
        hi_err += add_err
        R *= 2.0
        value = lo + hi
        rel = (lo_err + hi_err + tail_bound(R)) / value
        extra += 1
    if rel > tol:
        raise ToleranceError(
            f"moment quadrature reached {rel:.3e} > tol {tol:.3e}", achieved=rel
        )
    return value, rel, split, R


@dataclass(frozen=True)
class MomentResult:
    value: float
    error_estimate: float
    split_radius: float
    tail_radius: float


def moment_integral(spec: Symbol, s: float, k: float, t: float, tol: float = 1e-8) -> MomentResult:
    """I(s, k, t) = 2 pi * J(2s+1, k, 2t): the squared-transform moment.

    This is the weighted L2 mass of the kernel transform; the decay estimate
    under test bounds it by C * t^-(s+1) * g(A_t)^-(s-k+1).
    """
    value, rel, split, R = _radial_moment(spec, 2.0 * s + 1.0, k, 2.0 * t, tol)
    return MomentResult(2.0 * math.pi * value, rel, split, R)


def kernel_hs_norm(spec: Symbol, s: float, t: float, tol: float = 1e-8) -> float:
    """Homogeneous Sobolev norm of the kernel, (2 pi)^-1 sqrt(I(s, 0, t))."""
    return math.sqrt(moment_integral(spec, s, 0.0, t, tol).value) / (2.0 * math.pi)


def kernel_linf(spec: Symbol, t: float, tol: float = 1e-8) -> float:
    """Peak value of the kernel: (2 pi)^-1 * J(1, 0, t).

    The transform is positive, so the physical-space maximum sits at the
    origin and equals the inverse transform there.
    """
    value, _, _, _ = _radial_moment(spec, 1.0, 0.0, t, tol)
    return value / (2.0 * math.pi)


@dataclass(frozen=True)
class RatioScan:
    symbol_label: str
    s: float
    k: float
    t: np.ndarray
    values: np.ndarray
    ratios: np.ndarray
    spread: float
    cap: float
    passed: bool


def moment_ratio_scan(
    spec: Symbol,
    s: float,
    k: float,
    t_min: float = 1e-3,
    t_max: float = 1e3,
    points: int = 9,
    tol: float = 1e-7,
    cap: float = 50.0,
) -> RatioScan:
    """Scan I(s,k,t) * t^(s+1) * g(A_t)^(s-k+1) over a log grid of times.

    A bounded spread (max/min) of the ratio is the numerical signature of the
    moment decay estimate; g(A_t) is evaluated through the exact identity
    g(A_t) = 1/(t A_t^2) to avoid re-evaluating g at the root.
    """
    if points < 2:
        raise ParameterError("need at least 2 scan points")
    if not (0 < t_min < t_max):
        raise ParameterError("need 0 < t_min < t_max")
    ts = np.logspace(math.log10(t_min), math.log10(t_max), points)
    vals = np.empty_like(ts)
    ratios = np.empty_like(ts)
    for i, t in enumerate(ts):
        res = moment_integral(spec, s, k, float(t), tol)
        A = threshold_wavenumber(spec, float(t))
        # ratio = I * t^(s+1) * g(A)^(s-k+1) with g(A) = 1/(t A^2)
        ratios[i] = res.value * t ** k * A ** (-2.0 * (s - k + 1.0))
        vals[i] = res.value
    spread = float(np.max(ratios) / np.min(ratios))
    return RatioScan(
        symbol_label=spec.label(),
        s=float(s),
        k=float(k),
        t=ts,
        values=vals,
        ratios=ratios,
        spread=spread,
        cap=cap,
        passed=bool(spread <= cap),
    )


def _ln_threshold(spec, w):
    """Solve 2y + ln g(e^y) = w for y, the threshold radius in log coordinates."""
    y_hi = 0.5 * w
    lg = spec.ln_g_exp(y_hi)
    if not math.isfinite(lg):
        raise BracketError(f"{spec!r}: ln_g_exp not finite at y={y_hi:g}")
    if lg < 0.0:
        y_hi = 0.5 * (w - lg)
    y_lo = 0.5 * (w - spec.ln_g_exp(y_hi))
    for _ in range(200):
        mid = 0.5 * (y_lo + y_hi)
        if not (y_lo < mid < y_hi):
            break
        if 2.0 * mid + spec.ln_g_exp(mid) < w:
            y_lo = mid
        else:
            y_hi = mid
    return 0.5 * (y_lo + y_hi)


@dataclass(frozen=True)
class IdentityCheck:
    lhs: float
    rhs: float
    rel_gap: float


def decay_time_integral_identity(spec: Symbol, horizon: float, tol: float = 1e-6) -> IdentityCheck:
    """Check the change-of-variables identity for the decay-rate time integral.

    Using m(A_t) = 1/t, the integrand t^-1 g(A_t)^-1 equals A_t^2, so the
    left side is the non-singular integral of A_t^2 over (0, T].  The right
    side trades the time variable for radius: twice the growth integral from
    A_T plus 1/g(A_T), minus the (usually vanishing) 1/g(infinity).
    """
    A_T = threshold_wavenumber(spec, horizon)
    growth = growth_integral_from(spec, A_T, tol=min(tol / 10.0, 1e-8))
    if growth.status != "converged":
        raise ParameterError(
            f"identity requires an admissible symbol at T={horizon:g}; "
            f"growth integral status is {growth.status!r}"
        )
    ln_T = math.log(horizon)

    def integrand(v):
        # t A_t^2 = 1/g(A_t); log-radius form keeps this total in v even
        # where t = T e^-v or A_t itself leaves the double range
        return math.exp(-spec.ln_g_exp(_ln_threshold(spec, v - ln_T)))

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        lhs, lhs_err = integrate.quad(
            integrand, 0.0, np.inf, epsrel=max(tol / 10.0, 1e-12), limit=800
        )
    g_inf = spec.g_limit()
    limit_term = 0.0 if not np.isfinite(g_inf) else 1.0 / g_inf
    rhs = 2.0 * growth.value + 1.0 / spec.g(A_T) - limit_term
    rel_gap = abs(lhs - rhs) / abs(rhs)
    return IdentityCheck(lhs=lhs, rhs=rhs, rel_gap=rel_gap)


@dataclass(frozen=True)
class HessianComponents:
    l2_part: float
    hess_part: float
    product_ratio: float


def hessian_bound_components(spec: Symbol, t: float, tol: float = 1e-8) -> HessianComponents:
    """Pieces of the interpolation bound for the second-derivative kernel mass.

    l2_part is the L2 norm of |xi|^2 times the kernel transform; hess_part
    dominates the L2 norm of its spectral Hessian through the moments with
    matched g powers; their geometric mean times t g(A_t) should stay O(1).
    """
    l2_part = math.sqrt(moment_integral(spec, 2.0, 0.0, t, tol).value)
    hess_sq = (
        moment_integral(spec, 0.0, 0.0, t, tol).value
        + 4.0 * t ** 2 * moment_integral(spec, 2.0, 2.0, t, tol).value
        + 4.0 * t ** 4 * moment_integral(spec, 4.0, 4.0, t, tol).value
    )
    hess_part = math.sqrt(hess_sq)
    A = threshold_wavenumber(spec, t)
    product_ratio = math.sqrt(l2_part * hess_part) * t * spec.g(A)
    return HessianComponents(l2_part=l2_part, hess_part=hess_part, product_ratio=product_ratio)


def spectral_l1_ratio(grid, coef) -> float:
    """Interpolation ratio ||h_hat||_L1 / (||h||_L2^(1/2) ||h||_Hdot2^(1/2)).

    The transform L1 norm carries the symmetric-measure weight (2 pi)^-1 dxi,
    the normalization that makes the two-sided pairing unit-free; with it the
    optimal frequency-split argument gives the bound 2 sqrt(pi) ~ 3.545.
    Discretely the weighted lattice sum is 2 pi * sum |c_k| over the box
    series coefficients.
    """
    from . import spectral  # local import: spectral does not import this module

    grid.check_scalar(coef)
    l2 = spectral.l2_norm(grid, coef)
    hdot2 = spectral.hdot_norm(grid, coef, 2.0)
    if l2 <= 0 or hdot2 <= 0:
        raise ZeroFieldError("interpolation ratio needs a nonzero, non-constant field")
    l1hat = 2.0 * math.pi * float(np.sum(np.abs(coef)))
    return l1hat / math.sqrt(l2 * hdot2)
