"""Initial conditions: named deterministic vortices and seeded random bands."""

from __future__ import annotations

import numpy as np

from .errors import ParameterError
from .spectral import Grid, l2_norm


def orszag_tang(grid: Grid):
    """Classic vortex pair: u = (-sin x2, sin x1), b = (-sin x2, sin 2 x1)."""
    u = np.stack(
        [grid.to_spectral(-np.sin(grid.y)), grid.to_spectral(np.sin(grid.x))]
    )
    b = np.stack(
        [grid.to_spectral(-np.sin(grid.y)), grid.to_spectral(np.sin(2.0 * grid.x))]
    )
    return u, b


def taylor_green(grid: Grid, b_scale: float = 0.5):
    """Taylor-Green cell with the magnetic field a scaled copy."""
    u1 = -np.sin(grid.x) * np.cos(grid.y)
    u2 = np.cos(grid.x) * np.sin(grid.y)
    u = np.stack([grid.to_spectral(u1), grid.to_spectral(u2)])
    b = b_scale * u
    return u, b.copy()


def random_divfree_field(grid: Grid, rng, k_min: float = 1.0, k_max: float | None = None,
                         amplitude: float = 1.0):
    """Seeded divergence-free vector field band-limited in index magnitude.

    Built from real white noise, so coefficients are Hermitian by
    construction; normalized to the requested L2 amplitude.
    """
    if k_max is None:
        k_max = grid.n // 6
    ii = grid.index[:, None]
    jj = grid.index[None, :]
    imag = np.sqrt(ii ** 2 + jj ** 2)
    band = (imag >= k_min) & (imag <= k_max)
    noise = rng.standard_normal((2, grid.n, grid.n))
    coef = np.stack([grid.to_spectral(noise[0]), grid.to_spectral(noise[1])])
    coef *= band
    coef = grid.leray(coef)
    norm = l2_norm(grid, coef)
    if norm == 0.0:
        raise ParameterError("random band came out empty; widen [k_min, k_max]")
    return coef * (amplitude / norm)


def random_band(grid: Grid, seed: int = 0, k_min: float = 1.0, k_max: float | None = None,
                amplitude: float = 1.0):
    """Independent seeded bands for u and b."""
    rng = np.random.default_rng(seed)
    u = random_divfree_field(grid, rng, k_min, k_max, amplitude)
    b = random_divfree_field(grid, rng, k_min, k_max, amplitude)
    return u, b


PRESETS = {
    "orszag-tang": orszag_tang,
    "taylor-green": taylor_green,
    "random-band": random_band,
}


def make_initial(name: str, grid: Grid, **params):
    key = name.strip().lower()
    if key not in PRESETS:
        raise ParameterError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return PRESETS[key](grid, **params)
