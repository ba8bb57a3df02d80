"""Radial dissipation symbols g and the diffusion multiplier m(r) = r^2 g(r).

Every family is positive for r > 0, non-decreasing, and evaluates at r = 0
by its right limit.  The multiplier m is what the semigroup exponentiates:
the magnetic field coefficient at wavenumber k decays like exp(-t*m(|k|)).

Derivatives are analytic for the closed-form families; the tabulated family
falls back to central finite differences with relative step 1e-5.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError

FD_REL_STEP = 1e-5


def _softplus(y: float) -> float:
    """Scalar ln(1 + e^y), stable at both ends."""
    return max(y, 0.0) + math.log1p(math.exp(-abs(y)))


def _as_radial(r):
    """Validate r >= 0 and return (array, was_scalar)."""
    arr = np.asarray(r, dtype=float)
    if np.any(arr < 0):
        raise DomainError("symbol argument must satisfy r >= 0")
    return arr, arr.ndim == 0


def _unwrap(value, scalar):
    return float(value) if scalar else value


class Symbol:
    """Base class: subclasses provide g(r) and its first two derivatives."""

    family = "abstract"

    def g(self, r):
        raise NotImplementedError

    def g_derivs(self, r):
        """Return (g'(r), g''(r)); defined for r > 0 only."""
        raise NotImplementedError

    def multiplier(self, r):
        """m(r) = r^2 g(r), with m(0) = 0 by definition."""
        arr, scalar = _as_radial(r)
        m = arr ** 2 * self.g(arr)
        return _unwrap(m, scalar)

    def ln_g_exp(self, y: float) -> float:
        """Scalar ln g(e^y), usable even where e^y would over/underflow.

        Families override this with a directly stable expression; the base
        fallback only covers representable radii.
        """
        if abs(y) > 700.0:
            raise DomainError(f"{self.family}: ln_g_exp fallback needs |y| <= 700, got {y:g}")
        return math.log(float(self.g(math.exp(y))))

    def unbounded(self):
        """Whether g(r) -> infinity as r -> infinity."""
        raise NotImplementedError

    def g_limit(self):
        """sup_r g(r); np.inf for unbounded families."""
        return np.inf if self.unbounded() else None

    def params(self) -> dict:
        return {}

    def label(self) -> str:
        items = ",".join(f"{k}={v:g}" for k, v in self.params().items())
        return f"{self.family}({items})"

    def __repr__(self):
        return self.label()


def _check_positive(name, value):
    if not (value > 0) or not np.isfinite(value):
        raise ParameterError(f"{name} must be a finite positive number, got {value!r}")


@dataclass(frozen=True, repr=False)
class Power(Symbol):
    """g(r) = r**mu1 with mu1 > 0."""

    mu1: float
    family = "power"

    def __post_init__(self):
        _check_positive("mu1", self.mu1)

    def g(self, r):
        arr, scalar = _as_radial(r)
        return _unwrap(arr ** self.mu1, scalar)

    def g_derivs(self, r):
        arr, scalar = _as_radial(r)
        if np.any(arr == 0):
            raise DomainError("derivatives need r > 0")
        g1 = self.mu1 * arr ** (self.mu1 - 1.0)
        g2 = self.mu1 * (self.mu1 - 1.0) * arr ** (self.mu1 - 2.0)
        return _unwrap(g1, scalar), _unwrap(g2, scalar)

    def ln_g_exp(self, y):
        return self.mu1 * y

    def unbounded(self):
        return True

    def params(self):
        return {"mu1": self.mu1}


@dataclass(frozen=True, repr=False)
class LogPower(Symbol):
    """g(r) = log(1+r)**mu2 with mu2 > 0.

    The admissibility integral converges only for mu2 > 1; smaller exponents
    are legal constructions so the divergent regime can be probed.
    """

    mu2: float
    family = "logpower"

    def __post_init__(self):
        _check_positive("mu2", self.mu2)

    def g(self, r):
        arr, scalar = _as_radial(r)
        return _unwrap(np.log1p(arr) ** self.mu2, scalar)

    def g_derivs(self, r):
        arr, scalar = _as_radial(r)
        if np.any(arr == 0):
            raise DomainError("derivatives need r > 0")
        L = np.log1p(arr)
        mu = self.mu2
        g1 = mu * L ** (mu - 1.0) / (1.0 + arr)
        g2 = mu * L ** (mu - 2.0) * ((mu - 1.0) - L) / (1.0 + arr) ** 2
        return _unwrap(g1, scalar), _unwrap(g2, scalar)

    def ln_g_exp(self, y):
        sp = _softplus(y)
        return self.mu2 * math.log(sp) if sp > 0.0 else -math.inf

    def unbounded(self):
        return True

    def params(self):
        return {"mu2": self.mu2}


@dataclass(frozen=True, repr=False)
class PowerLog(Symbol):
    """g(r) = r**mu3 * log(1+r)**mu4 with mu3 > 0, mu4 >= 0."""

    mu3: float
    mu4: float = 0.0
    family = "powerlog"

    def __post_init__(self):
        _check_positive("mu3", self.mu3)
        if self.mu4 < 0 or not np.isfinite(self.mu4):
            raise ParameterError(f"mu4 must be >= 0, got {self.mu4!r}")

    def g(self, r):
        arr, scalar = _as_radial(r)
        if self.mu4 == 0:
            return _unwrap(arr ** self.mu3, scalar)
        return _unwrap(arr ** self.mu3 * np.log1p(arr) ** self.mu4, scalar)

    def g_derivs(self, r):
        arr, scalar = _as_radial(r)
        if np.any(arr == 0):
            raise DomainError("derivatives need r > 0")
        a, b = self.mu3, self.mu4
        if b == 0:
            g1 = a * arr ** (a - 1.0)
            g2 = a * (a - 1.0) * arr ** (a - 2.0)
            return _unwrap(g1, scalar), _unwrap(g2, scalar)
        L = np.log1p(arr)
        opr = 1.0 + arr
        g1 = a * arr ** (a - 1.0) * L ** b + b * arr ** a * L ** (b - 1.0) / opr
        g2 = (
            a * (a - 1.0) * arr ** (a - 2.0) * L ** b
            + 2.0 * a * b * arr ** (a - 1.0) * L ** (b - 1.0) / opr
            + b * (b - 1.0) * arr ** a * L ** (b - 2.0) / opr ** 2
            - b * arr ** a * L ** (b - 1.0) / opr ** 2
        )
        return _unwrap(g1, scalar), _unwrap(g2, scalar)

    def ln_g_exp(self, y):
        if self.mu4 == 0:
            return self.mu3 * y
        sp = _softplus(y)
        if sp <= 0.0:
            return -math.inf
        return self.mu3 * y + self.mu4 * math.log(sp)

    def unbounded(self):
        return True

    def params(self):
        return {"mu3": self.mu3, "mu4": self.mu4}


@dataclass(frozen=True, repr=False)
class LogLogLog(Symbol):
    """g(r) = log(1+r) * log(1+log(1+r))**mu5 with mu5 > 0.

    Convergent admissibility integral requires mu5 > 1.
    """

    mu5: float
    family = "logloglog"

    def __post_init__(self):
        _check_positive("mu5", self.mu5)

    def g(self, r):
        arr, scalar = _as_radial(r)
        L = np.log1p(arr)
        return _unwrap(L * np.log1p(L) ** self.mu5, scalar)

    def g_derivs(self, r):
        arr, scalar = _as_radial(r)
        if np.any(arr == 0):
            raise DomainError("derivatives need r > 0")
        mu = self.mu5
        opr = 1.0 + arr
        L = np.log1p(arr)
        M = np.log1p(L)
        opl = 1.0 + L
        dL = 1.0 / opr
        ddL = -1.0 / opr ** 2
        dM = 1.0 / (opr * opl)
        ddM = -(2.0 + L) / (opr ** 2 * opl ** 2)
        g1 = dL * M ** mu + mu * L * M ** (mu - 1.0) * dM
        g2 = (
            ddL * M ** mu
            + 2.0 * mu * dL * M ** (mu - 1.0) * dM
            + mu * (mu - 1.0) * L * M ** (mu - 2.0) * dM ** 2
            + mu * L * M ** (mu - 1.0) * ddM
        )
        return _unwrap(g1, scalar), _unwrap(g2, scalar)

    def ln_g_exp(self, y):
        sp = _softplus(y)
        if sp <= 0.0:
            return -math.inf
        return math.log(sp) + self.mu5 * math.log(math.log1p(sp))

    def unbounded(self):
        return True

    def params(self):
        return {"mu5": self.mu5}


@dataclass(frozen=True, repr=False)
class Constant(Symbol):
    """g(r) = c > 0.  Plain Laplacian-strength diffusion; never admissible."""

    c: float = 1.0
    family = "constant"

    def __post_init__(self):
        _check_positive("c", self.c)

    def g(self, r):
        arr, scalar = _as_radial(r)
        return _unwrap(np.full_like(arr, self.c), scalar)

    def g_derivs(self, r):
        arr, scalar = _as_radial(r)
        if np.any(arr == 0):
            raise DomainError("derivatives need r > 0")
        z = np.zeros_like(arr)
        return _unwrap(z, scalar), _unwrap(z.copy(), scalar)

    def ln_g_exp(self, y):
        return math.log(self.c)

    def unbounded(self):
        return False

    def g_limit(self):
        return self.c

    def params(self):
        return {"c": self.c}


class Tabulated(Symbol):
    """Monotone piecewise-linear symbol from (r, g) knots.

    Below the first knot the value is held constant; beyond the last knot the
    final segment's slope is continued, so the family stays non-decreasing.
    Derivatives use central finite differences (relative step 1e-5).
    """

    family = "tabulated"

    def __init__(self, knots_r, knots_g):
        r = np.asarray(knots_r, dtype=float)
        gv = np.asarray(knots_g, dtype=float)
        if r.ndim != 1 or r.shape != gv.shape or r.size < 2:
            raise ParameterError("tabulated symbol needs two equal-length knot arrays, size >= 2")
        if np.any(r < 0) or np.any(np.diff(r) <= 0):
            raise ParameterError("knot radii must be non-negative and strictly increasing")
        if np.any(gv <= 0) or np.any(np.diff(gv) < 0):
            raise ParameterError("knot values must be positive and non-decreasing")
        self.knots_r = r
        self.knots_g = gv
        self.last_slope = (gv[-1] - gv[-2]) / (r[-1] - r[-2])

    @classmethod
    def from_csv(cls, path):
        """Load knots from a two-column CSV with header ``r,g``."""
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["r", "g"]:
                raise ParameterError(f"{path}: expected CSV header 'r,g'")
            rows = [(float(a), float(b)) for a, b in reader]
        if not rows:
            raise ParameterError(f"{path}: no knot rows")
        r, gv = zip(*rows)
        return cls(r, gv)

    def g(self, r):
        arr, scalar = _as_radial(r)
        out = np.interp(arr, self.knots_r, self.knots_g)
        beyond = arr > self.knots_r[-1]
        if np.any(beyond):
            out = np.where(
                beyond,
                self.knots_g[-1] + self.last_slope * (arr - self.knots_r[-1]),
                out,
            )
        return _unwrap(out, scalar)

    def g_derivs(self, r):
        arr, scalar = _as_radial(r)
        if np.any(arr == 0):
            raise DomainError("derivatives need r > 0")
        h = FD_REL_STEP * arr
        gp = self.g(arr + h)
        gm = self.g(np.maximum(arr - h, 0.0))
        g0 = self.g(arr)
        g1 = (gp - gm) / (2.0 * h)
        g2 = (gp - 2.0 * g0 + gm) / h ** 2
        return _unwrap(g1, scalar), _unwrap(g2, scalar)

    def ln_g_exp(self, y):
        if y <= math.log(self.knots_r[-1]) or self.last_slope == 0.0:
            if y > 700.0:  # flat extension: constant beyond the last knot
                return math.log(float(self.knots_g[-1]))
            return math.log(float(self.g(math.exp(min(y, 700.0)))))
        # linear extension: g = slope * e^y * (1 + c0 * e^-y)
        c0 = (self.knots_g[-1] - self.last_slope * self.knots_r[-1]) / self.last_slope
        return y + math.log(self.last_slope) + math.log1p(c0 * math.exp(-y))

    def unbounded(self):
        return self.last_slope > 0

    def g_limit(self):
        return np.inf if self.unbounded() else float(self.knots_g[-1])

    def params(self):
        return {"knots": float(self.knots_r.size)}

    def label(self):
        return f"tabulated({self.knots_r.size} knots)"

    def __repr__(self):
        return self.label()


_FAMILIES = {
    "power": (Power, ("mu1",)),
    "logpower": (LogPower, ("mu2",)),
    "powerlog": (PowerLog, ("mu3", "mu4")),
    "logloglog": (LogLogLog, ("mu5",)),
    "constant": (Constant, ("c",)),
}


def make_symbol(family: str, **params) -> Symbol:
    """Construct a symbol by family name; tabulated accepts knots_csv=path."""
    fam = family.strip().lower()
    if fam == "tabulated":
        path = params.pop("knots_csv", None)
        if path is None:
            if "knots_r" in params and "knots_g" in params:
                return Tabulated(params.pop("knots_r"), params.pop("knots_g"))
            raise ParameterError("tabulated symbol needs knots_csv=<path> or knot arrays")
        if params:
            raise ParameterError(f"unexpected parameters for tabulated: {sorted(params)}")
        return Tabulated.from_csv(path)
    if fam not in _FAMILIES:
        raise ParameterError(
            f"unknown family {family!r}; expected one of "
            "power, logpower, powerlog, logloglog, constant, tabulated"
        )
    cls, names = _FAMILIES[fam]
    unknown = set(params) - set(names)
    if unknown:
        raise ParameterError(f"unexpected parameters for {fam}: {sorted(unknown)}")
    missing = [n for n in names if n not in params and n != "mu4" and n != "c"]
    if missing:
        raise ParameterError(f"{fam} requires parameters: {missing}")
    return cls(**params)


@dataclass(frozen=True)
class MikhlinReport:
    """Grid suprema of |r g'/g| and |r^2 g''/g| with the pass verdict."""

    order1: float
    order2: float
    cap: float
    r_min: float
    r_max: float
    points: int
    passed: bool

    def grid_label(self):
        return f"log[{self.r_min:g},{self.r_max:g}]x{self.points}"


def check_mikhlin(
    spec: Symbol,
    r_min: float = 1e-3,
    r_max: float = 1e3,
    points: int = 512,
    cap: float = 64.0,
) -> MikhlinReport:
    """Estimate the derivative-control constants on a log grid.

    The suprema certify (on the sampled grid) that |g'| <= C1 |g|/r and
    |g''| <= C2 |g|/r^2, the smoothness the kernel estimates assume.
    """
    if not (0 < r_min < r_max):
        raise ParameterError("need 0 < r_min < r_max")
    if points < 16:
        raise ParameterError("need at least 16 grid points")
    r = np.logspace(np.log10(r_min), np.log10(r_max), points)
    gv = spec.g(r)
    g1, g2 = spec.g_derivs(r)
    c1 = float(np.max(np.abs(r * g1 / gv)))
    c2 = float(np.max(np.abs(r ** 2 * g2 / gv)))
    return MikhlinReport(
        order1=c1,
        order2=c2,
        cap=cap,
        r_min=r_min,
        r_max=r_max,
        points=points,
        passed=bool(max(c1, c2) <= cap),
    )


def monotonicity_check(spec: Symbol, r_min=1e-6, r_max=1e6, points=2048) -> bool:
    """Sampled check that g is positive and non-decreasing and m increasing."""
    r = np.logspace(np.log10(r_min), np.log10(r_max), points)
    gv = np.asarray(spec.g(r))
    if np.any(gv <= 0) or np.any(~np.isfinite(gv)):
        return False
    if np.any(np.diff(gv) < -1e-12 * np.maximum(gv[:-1], gv[1:])):
        return False
    m = np.asarray(spec.multiplier(r))
    return bool(np.all(np.diff(m) > 0))
