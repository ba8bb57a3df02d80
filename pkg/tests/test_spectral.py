"""Grid transforms, spectral operators, and norm conventions."""

import math

import numpy as np
import pytest

from gmhd import GridMismatchError, ParameterError, Power
from gmhd.spectral import (
    Grid,
    diss_norm,
    gradient_split_constants,
    hdot_norm,
    hs_norm,
    l2_norm,
    l4_norm,
    linf_norm,
)


def test_grid_validation():
    with pytest.raises(ParameterError):
        Grid(15)
    with pytest.raises(ParameterError):
        Grid(14)
    with pytest.raises(ParameterError):
        Grid(64, box_length=0.0)


def test_roundtrip_identity():
    grid = Grid(32)
    rng = np.random.default_rng(7)
    f = rng.standard_normal((32, 32))
    back = grid.to_physical(grid.to_spectral(f))
    assert np.max(np.abs(back - f)) <= 1e-12


def test_single_mode_coefficients():
    grid = Grid(32)
    c = grid.to_spectral(np.cos(grid.x))
    # cos x1 = (e^{i x1} + e^{-i x1})/2: half weight at index (+-1, 0)
    assert c[1, 0] == pytest.approx(0.5, abs=1e-13)
    assert c[-1, 0] == pytest.approx(0.5, abs=1e-13)
    mask = np.ones_like(c, dtype=bool)
    mask[1, 0] = mask[-1, 0] = False
    assert np.max(np.abs(c[mask])) <= 1e-13


def test_parseval_l2():
    # ||sin x1||_L2 over the 2 pi box = sqrt(4 pi^2 / 2) = pi sqrt(2)
    grid = Grid(64)
    c = grid.to_spectral(np.sin(grid.x))
    assert l2_norm(grid, c) == pytest.approx(math.pi * math.sqrt(2.0), rel=1e-12)


def test_derivative_operators():
    grid = Grid(32)
    c = grid.to_spectral(np.sin(grid.x) * np.cos(2.0 * grid.y))
    gx, gy = grid.grad(c)
    expect_x = grid.to_spectral(np.cos(grid.x) * np.cos(2.0 * grid.y))
    expect_y = grid.to_spectral(-2.0 * np.sin(grid.x) * np.sin(2.0 * grid.y))
    assert np.max(np.abs(gx - expect_x)) <= 1e-12
    assert np.max(np.abs(gy - expect_y)) <= 1e-12


def test_curl_of_stream_vortex():
    # u = (-sin y, sin x) has curl = cos x + cos y
    grid = Grid(32)
    u = np.stack([grid.to_spectral(-np.sin(grid.y)), grid.to_spectral(np.sin(grid.x))])
    omega = grid.to_physical(grid.curl(u))
    assert np.max(np.abs(omega - (np.cos(grid.x) + np.cos(grid.y)))) <= 1e-12


def test_leray_kills_gradients_and_is_idempotent():
    grid = Grid(32)
    rng = np.random.default_rng(3)
    phi = grid.to_spectral(rng.standard_normal((32, 32)))
    gradient = grid.grad(phi)
    assert l2_norm(grid, grid.leray(gradient)) <= 1e-12 * l2_norm(grid, gradient)
    v = np.stack([
        grid.to_spectral(rng.standard_normal((32, 32))),
        grid.to_spectral(rng.standard_normal((32, 32))),
    ])
    once = grid.leray(v)
    twice = grid.leray(once)
    assert np.max(np.abs(twice - once)) <= 1e-14
    assert grid.div_residual(once) <= 1e-13


def test_dealias_mask_cuts_above_third():
    grid = Grid(30)
    assert grid.dealias_mask[10, 0]
    assert not grid.dealias_mask[11, 0]
    assert not grid.dealias_mask[0, 11]


def test_product_dealiased_square():
    # cos^2 x = 1/2 + cos(2x)/2: coefficients 1/2 at 0 and 1/4 at +-2
    grid = Grid(32)
    c = grid.to_spectral(np.cos(grid.x))
    sq = grid.product(c, c)
    assert sq[0, 0] == pytest.approx(0.5, abs=1e-13)
    assert sq[2, 0] == pytest.approx(0.25, abs=1e-13)
    assert sq[-2, 0] == pytest.approx(0.25, abs=1e-13)
    mask = np.ones_like(sq, dtype=bool)
    mask[0, 0] = mask[2, 0] = mask[-2, 0] = False
    assert np.max(np.abs(sq[mask])) <= 1e-13


def test_advect_single_mode_oracle():
    # (a . grad) f with a = (0, sin x1), f = sin x2: a2 d2 f = sin x1 cos x2
    grid = Grid(32)
    a = np.stack([grid.scalar(), grid.to_spectral(np.sin(grid.x))])
    f = grid.to_spectral(np.sin(grid.y))
    adv = grid.to_physical(grid.advect(a, f))
    assert np.max(np.abs(adv - np.sin(grid.x) * np.cos(grid.y))) <= 1e-12


def test_advect_vector_matches_componentwise():
    grid = Grid(32)
    rng = np.random.default_rng(11)
    a = np.stack([
        grid.to_spectral(rng.standard_normal((32, 32))),
        grid.to_spectral(rng.standard_normal((32, 32))),
    ])
    f = np.stack([
        grid.to_spectral(rng.standard_normal((32, 32))),
        grid.to_spectral(rng.standard_normal((32, 32))),
    ])
    full = grid.advect(a, f)
    for comp in range(2):
        assert np.max(np.abs(full[comp] - grid.advect(a, f[comp]))) <= 1e-13


def test_shape_checks_raise():
    grid = Grid(32)
    with pytest.raises(GridMismatchError):
        grid.grad(np.zeros((16, 16), dtype=complex))
    with pytest.raises(GridMismatchError):
        grid.curl(grid.scalar())
    with pytest.raises(GridMismatchError):
        grid.leray(np.zeros((3, 32, 32), dtype=complex))


def test_hermitian_residual_detects_asymmetry():
    grid = Grid(32)
    c = grid.to_spectral(np.cos(grid.x))
    assert grid.hermitian_residual(c) <= 1e-14
    c[1, 0] += 0.5j  # breaks c(-k) = conj(c(k))
    assert grid.hermitian_residual(c) >= 0.2
    assert grid.hermitian_residual(grid.scalar()) == 0.0


def test_sobolev_and_dissipation_norms_single_mode():
    grid = Grid(32)
    c = grid.to_spectral(np.sin(2.0 * grid.x))  # |k| = 2, l2 = pi sqrt(2)
    base = math.pi * math.sqrt(2.0)
    assert hdot_norm(grid, c, 1.0) == pytest.approx(2.0 * base, rel=1e-12)
    assert hdot_norm(grid, c, 2.0) == pytest.approx(4.0 * base, rel=1e-12)
    assert hs_norm(grid, c, 1.0) == pytest.approx(math.sqrt(5.0) * base, rel=1e-12)
    m = Power(1.0).multiplier(grid.kmag)  # m(2) = 8
    assert diss_norm(grid, c, m) == pytest.approx(math.sqrt(8.0) * base, rel=1e-12)
    # constant offsets drop from homogeneous norms only
    c0 = c.copy()
    c0[0, 0] = 3.0
    assert hdot_norm(grid, c0, 1.0) == pytest.approx(2.0 * base, rel=1e-12)
    assert hs_norm(grid, c0, 1.0) > hs_norm(grid, c, 1.0)


def test_linf_norm_and_oversampling():
    grid = Grid(32)
    c = grid.to_spectral(np.cos(grid.x) + 0.5 * np.cos(3.0 * grid.x))
    assert linf_norm(grid, c) == pytest.approx(1.5, rel=1e-12)
    # the peak of cos((n/2-1) x) sits between collocation points; refinement
    # must increase the reported maximum toward the true 1.0
    spike = grid.to_spectral(np.cos(15.0 * grid.x + 0.3))
    coarse = linf_norm(grid, spike)
    fine = linf_norm(grid, spike, oversample=4)
    assert fine >= coarse
    assert fine == pytest.approx(1.0, rel=1e-3)
    with pytest.raises(ParameterError):
        linf_norm(grid, c, oversample=0)


def test_vector_linf_is_pointwise_magnitude():
    grid = Grid(32)
    v = np.stack([grid.to_spectral(np.cos(grid.x)), grid.to_spectral(np.sin(grid.x))])
    # |v|^2 = cos^2 + sin^2 = 1 pointwise
    assert linf_norm(grid, v) == pytest.approx(1.0, rel=1e-12)


def test_l4_norm_closed_form():
    # ||cos x||_L4^4 = (2 pi)^2 * 3/8
    grid = Grid(64)
    c = grid.to_spectral(np.cos(grid.x))
    expect = (3.0 / 8.0 * (2.0 * math.pi) ** 2) ** 0.25
    assert l4_norm(grid, c) == pytest.approx(expect, rel=1e-12)


def test_gradient_split_constants():
    from gmhd import Constant, Tabulated

    c1, c2 = gradient_split_constants(Power(1.0))
    assert (c1, c2) == (1.0, 1.0)
    # larger g(1) weakens the dissipative term's required weight
    assert gradient_split_constants(Constant(4.0))[1] == pytest.approx(0.5, rel=1e-12)
    tab = Tabulated([0.0, 1.0], [2.0, 2.0])
    assert gradient_split_constants(tab)[1] == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-12)

    # the split inequality itself: ||grad h|| <= C1 ||h|| + C2 ||L^1/2 h||
    grid = Grid(32)
    rng = np.random.default_rng(5)
    spec = Power(1.0)
    m = spec.multiplier(grid.kmag)
    for _ in range(20):
        h = grid.to_spectral(rng.standard_normal((32, 32)))
        lhs = hdot_norm(grid, h, 1.0)
        rhs = c1 * l2_norm(grid, h) + c2 * diss_norm(grid, h, m)
        assert lhs <= rhs * (1.0 + 1e-12)


def test_custom_box_length_scaling():
    # box 4 pi halves the fundamental wavenumber
    grid = Grid(32, box_length=4.0 * math.pi)
    c = grid.to_spectral(np.cos(0.5 * grid.x))
    assert hdot_norm(grid, c, 1.0) == pytest.approx(0.5 * l2_norm(grid, c), rel=1e-12)
