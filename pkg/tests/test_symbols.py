"""Symbol family evaluations against hand-derived values."""

import math

import numpy as np
import pytest

from gmhd import (
    Constant,
    DomainError,
    LogLogLog,
    LogPower,
    ParameterError,
    Power,
    PowerLog,
    Tabulated,
    make_symbol,
)
from gmhd.symbols import check_mikhlin, monotonicity_check

E1 = math.e - 1.0  # ln(1 + E1) = 1 exactly up to rounding

ALL_FAMILIES = [
    Power(1.0),
    Power(2.0),
    LogPower(2.0),
    PowerLog(1.0, 1.0),
    PowerLog(2.0, 0.0),
    LogLogLog(2.0),
    Constant(1.0),
    Tabulated([0.0, 1.0, 2.0], [1.0, 2.0, 4.0]),
]


def test_power_point_values():
    spec = Power(1.0)
    assert spec.g(2.0) == 2.0
    assert spec.multiplier(3.0) == 27.0
    assert spec.multiplier(0.0) == 0.0
    # (1/2)^2 * (1/2)^2 = 1/16
    assert Power(2.0).multiplier(0.5) == pytest.approx(1.0 / 16.0, rel=1e-15)


def test_power_derivatives_closed_form():
    g1, g2 = Power(2.0).g_derivs(3.0)
    assert g1 == pytest.approx(6.0, rel=1e-14)
    assert g2 == pytest.approx(2.0, rel=1e-14)


def test_logpower_unit_point():
    # ln(1 + (e-1)) = 1, so g = 1 for any exponent
    assert LogPower(2.0).g(E1) == pytest.approx(1.0, rel=1e-14)
    assert LogPower(7.5).g(E1) == pytest.approx(1.0, rel=1e-14)


def test_powerlog_point_values():
    spec = PowerLog(1.0, 1.0)
    assert spec.g(E1) == pytest.approx(E1, rel=1e-14)
    assert spec.multiplier(E1) == pytest.approx(E1 ** 3, rel=1e-14)
    # mu4 = 0 reduces to the pure power
    assert PowerLog(2.0, 0.0).g(3.0) == pytest.approx(9.0, rel=1e-14)


def test_logloglog_point_value():
    # g(e-1) = ln(e) * ln(1 + ln(e))^2 = ln(2)^2
    assert LogLogLog(2.0).g(E1) == pytest.approx(math.log(2.0) ** 2, rel=1e-14)


def test_constant_level():
    spec = Constant(3.0)
    r = np.array([0.1, 1.0, 50.0])
    assert np.allclose(spec.g(r), 3.0)
    assert spec.multiplier(2.0) == pytest.approx(12.0, rel=1e-15)
    assert spec.g_limit() == 3.0
    assert not spec.unbounded()


def test_vector_broadcast_matches_scalar():
    r = np.array([0.25, 1.0, 7.0])
    for spec in ALL_FAMILIES:
        vec = np.asarray(spec.g(r))
        for i, ri in enumerate(r):
            assert vec[i] == pytest.approx(spec.g(float(ri)), rel=1e-14)


def test_derivatives_match_finite_differences():
    # first difference at relative step 1e-6; the second difference needs a
    # wider step (1e-4) to keep the eps/h^2 roundoff below truncation
    for spec in ALL_FAMILIES:
        if isinstance(spec, Tabulated):
            continue  # its derivatives are themselves finite differences
        for r in (0.3, 1.0, 4.7, 120.0):
            h = 1e-6 * r
            fd1 = (spec.g(r + h) - spec.g(r - h)) / (2.0 * h)
            g1, g2 = spec.g_derivs(r)
            assert g1 == pytest.approx(fd1, rel=1e-7, abs=1e-12)
            h = 1e-4 * r
            fd2 = (spec.g(r + h) - 2.0 * spec.g(r) + spec.g(r - h)) / h ** 2
            scale = abs(spec.g(r)) / r ** 2
            assert g2 == pytest.approx(fd2, rel=1e-5, abs=1e-6 * scale)


def test_derivatives_reject_origin():
    with pytest.raises(DomainError):
        Power(2.0).g_derivs(0.0)


def test_parameter_validation():
    with pytest.raises(ParameterError):
        Power(0.0)
    with pytest.raises(ParameterError):
        Power(-1.0)
    with pytest.raises(ParameterError):
        Power(math.nan)
    with pytest.raises(ParameterError):
        LogPower(-0.5)
    with pytest.raises(ParameterError):
        PowerLog(1.0, -0.25)
    with pytest.raises(ParameterError):
        Constant(0.0)


def test_ln_g_exp_matches_direct_evaluation():
    for spec in ALL_FAMILIES:
        for y in (-5.0, -0.5, 0.0, 1.0, 3.0, 40.0):
            direct = math.log(float(spec.g(math.exp(y))))
            assert spec.ln_g_exp(y) == pytest.approx(direct, rel=1e-12, abs=1e-12)


def test_ln_g_exp_extreme_arguments_stay_finite():
    # radii e^1e4 and e^-1e4 are unrepresentable; the log form must not be
    huge, tiny = 1.0e4, -1.0e4
    assert Power(1.5).ln_g_exp(huge) == pytest.approx(1.5e4, rel=1e-15)
    assert Power(1.5).ln_g_exp(tiny) == pytest.approx(-1.5e4, rel=1e-15)
    # ln g = mu2 * ln(ln(1 + e^y)) ~ mu2 * ln(y) for huge y
    assert LogPower(2.0).ln_g_exp(huge) == pytest.approx(2.0 * math.log(1.0e4), rel=1e-12)
    assert PowerLog(1.0, 1.0).ln_g_exp(huge) == pytest.approx(1.0e4 + math.log(1.0e4), rel=1e-12)
    assert LogLogLog(2.0).ln_g_exp(huge) == pytest.approx(
        math.log(1.0e4) + 2.0 * math.log(math.log(1.0 + 1.0e4)), rel=1e-10
    )
    assert Constant(2.0).ln_g_exp(huge) == pytest.approx(math.log(2.0), rel=1e-15)
    # rising tabulated extension: g ~ last_slope * r
    tab = Tabulated([0.0, 1.0, 2.0], [1.0, 2.0, 4.0])
    assert tab.ln_g_exp(huge) == pytest.approx(huge + math.log(2.0), rel=1e-12)
    # flat tabulated extension: g is eventually constant
    flat = Tabulated([0.0, 1.0, 2.0], [1.0, 2.0, 2.0])
    assert flat.ln_g_exp(huge) == pytest.approx(math.log(2.0), rel=1e-12)
    # softplus(y) -> 0 for very negative y: logs of g diverge downward, but
    # only where the family actually vanishes at the origin
    assert PowerLog(1.0, 1.0).ln_g_exp(tiny) < -9000.0


def test_tabulated_interpolation_and_extension():
    tab = Tabulated([0.0, 1.0, 2.0], [1.0, 2.0, 4.0])
    assert tab.g(0.5) == pytest.approx(1.5, rel=1e-15)
    assert tab.g(1.5) == pytest.approx(3.0, rel=1e-15)
    # last-segment slope 2 continues past the final knot
    assert tab.g(4.0) == pytest.approx(4.0 + 2.0 * 2.0, rel=1e-15)
    assert tab.last_slope == pytest.approx(2.0, rel=1e-15)
    assert tab.unbounded()
    # left fill is constant
    assert Tabulated([1.0, 2.0], [3.0, 4.0]).g(0.1) == pytest.approx(3.0, rel=1e-15)


def test_tabulated_validation():
    with pytest.raises(ParameterError):
        Tabulated([0.0], [1.0])  # too few knots
    with pytest.raises(ParameterError):
        Tabulated([1.0, 0.5], [1.0, 2.0])  # radii not increasing
    with pytest.raises(ParameterError):
        Tabulated([0.0, 1.0], [2.0, 1.0])  # values decreasing
    with pytest.raises(ParameterError):
        Tabulated([0.0, 1.0], [0.0, 1.0])  # non-positive value


def test_tabulated_csv_roundtrip(tmp_path):
    path = tmp_path / "knots.csv"
    path.write_text("r,g\n0.0,1.0\n1.0,2.0\n3.0,5.0\n")
    tab = Tabulated.from_csv(path)
    assert tab.g(1.0) == pytest.approx(2.0, rel=1e-15)
    assert tab.g(2.0) == pytest.approx(3.5, rel=1e-15)
    bad = tmp_path / "bad.csv"
    bad.write_text("radius,value\n0.0,1.0\n")
    with pytest.raises(ParameterError):
        Tabulated.from_csv(bad)
    empty = tmp_path / "empty.csv"
    empty.write_text("r,g\n")
    with pytest.raises(ParameterError):
        Tabulated.from_csv(empty)


def test_make_symbol_dispatch(tmp_path):
    assert isinstance(make_symbol("power", mu1=1.0), Power)
    assert isinstance(make_symbol("PowerLog", mu3=1.0), PowerLog)
    assert make_symbol("powerlog", mu3=1.0).mu4 == 0.0  # pure power by default
    assert make_symbol("constant").c == 1.0
    path = tmp_path / "knots.csv"
    path.write_text("r,g\n0.0,1.0\n1.0,2.0\n")
    assert isinstance(make_symbol("tabulated", knots_csv=str(path)), Tabulated)
    with pytest.raises(ParameterError):
        make_symbol("gaussian")
    with pytest.raises(ParameterError):
        make_symbol("power")  # missing mu1
    with pytest.raises(ParameterError):
        make_symbol("power", mu1=1.0, mu2=2.0)  # stray parameter


def test_labels_are_informative():
    assert Power(1.0).label() == "power(mu1=1)"
    assert PowerLog(1.0, 1.0).label() == "powerlog(mu3=1,mu4=1)"
    assert "2 knots" in Tabulated([0.0, 1.0], [1.0, 2.0]).label()


def test_mikhlin_constants_power_exact():
    # r g'/g = mu and r^2 g''/g = mu(mu-1) identically for the pure power
    for mu in (0.5, 1.0, 3.0):
        rep = check_mikhlin(Power(mu))
        assert rep.order1 == pytest.approx(mu, rel=1e-10)
        assert rep.order2 == pytest.approx(abs(mu * (mu - 1.0)), rel=1e-10, abs=1e-10)
        assert rep.passed


def test_mikhlin_constants_bounded_for_log_families():
    for spec in (LogPower(2.0), PowerLog(1.0, 1.0), LogLogLog(2.0)):
        rep = check_mikhlin(spec)
        assert max(rep.order1, rep.order2) <= 8.0
        assert rep.passed


def test_mikhlin_validation():
    with pytest.raises(ParameterError):
        check_mikhlin(Power(1.0), r_min=1.0, r_max=0.5)
    with pytest.raises(ParameterError):
        check_mikhlin(Power(1.0), points=4)


def test_monotonicity_check_accepts_all_families():
    for spec in ALL_FAMILIES:
        assert monotonicity_check(spec)


def test_monotonicity_check_rejects_decreasing():
    class Falling(Power):
        def g(self, r):
            return 1.0 / (1.0 + np.asarray(r, dtype=float))

    assert not monotonicity_check(Falling(1.0))
