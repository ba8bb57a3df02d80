"""Run configuration files: INI sections [grid], [symbol], [time], [diagnostics].

Optional extras: [initial] (preset selection) and [admissibility] (horizon
list for the certification subcommand).  Every field has a default except the
symbol family; numbers are plain decimal literals, booleans true/false.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field

from .errors import ParameterError
from .solver import SolverConfig
from .spectral import Grid
from .symbols import Symbol, make_symbol

_SYMBOL_PARAM_KEYS = ("mu1", "mu2", "mu3", "mu4", "mu5", "c")


@dataclass
class RunConfig:
    grid: Grid
    symbol: Symbol
    solver: SolverConfig
    preset: str = "orszag-tang"
    preset_params: dict = field(default_factory=dict)
    horizons: list = field(default_factory=lambda: [1.0])
    adm_tol: float = 1e-8
    mikhlin_cap: float = 64.0
    raw: dict = field(default_factory=dict)


def _parse_bool(text, where):
    val = text.strip().lower()
    if val in ("true", "yes", "on", "1"):
        return True
    if val in ("false", "no", "off", "0"):
        return False
    raise ParameterError(f"{where}: expected a boolean, got {text!r}")


def symbol_from_mapping(mapping) -> Symbol:
    """Build a symbol from a {family: ..., mu1: ..., knots_csv: ...} mapping."""
    if "family" not in mapping:
        raise ParameterError("symbol section needs a 'family' key")
    family = mapping["family"]
    params = {}
    for key in _SYMBOL_PARAM_KEYS:
        if key in mapping and mapping[key] != "":
            params[key] = float(mapping[key])
    if "knots_csv" in mapping and mapping["knots_csv"]:
        params["knots_csv"] = mapping["knots_csv"]
    return make_symbol(family, **params)


def load_config(path) -> RunConfig:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ParameterError(f"could not read config file {path!r}")

    raw = {s: dict(parser.items(s)) for s in parser.sections()}

    gsec = raw.get("grid", {})
    n = int(gsec.get("n", "64"))
    box = float(gsec.get("box_length", repr(2.0 * math.pi)))
    grid = Grid(n, box)

    if "symbol" not in raw:
        raise ParameterError(f"{path}: missing [symbol] section")
    symbol = symbol_from_mapping(raw["symbol"])

    tsec = raw.get("time", {})
    dt_text = tsec.get("dt", "auto").strip().lower()
    dt = None if dt_text in ("auto", "", "cfl") else float(dt_text)
    dsec = raw.get("diagnostics", {})
    solver = SolverConfig(
        grid=grid,
        symbol=symbol,
        t_end=float(tsec.get("t_end", "1.0")),
        dt=dt,
        cfl=float(tsec.get("cfl", "0.4")),
        nonlinear=_parse_bool(tsec.get("nonlinear", "true"), "[time] nonlinear"),
        filter_enabled=_parse_bool(tsec.get("filter", "false"), "[time] filter"),
        stride=int(dsec.get("stride", "1")),
        hs_order=float(dsec.get("hs_order", "2.5")),
        oversample=int(dsec.get("oversample", "1")),
        seed=int(dsec.get("seed", "0")),
    )

    isec = raw.get("initial", {})
    preset = isec.get("preset", "orszag-tang")
    preset_params = {}
    if "b_scale" in isec:
        preset_params["b_scale"] = float(isec["b_scale"])
    if "k_min" in isec:
        preset_params["k_min"] = float(isec["k_min"])
    if "k_max" in isec:
        preset_params["k_max"] = float(isec["k_max"])
    if "amplitude" in isec:
        preset_params["amplitude"] = float(isec["amplitude"])
    if preset.strip().lower() == "random-band":
        preset_params.setdefault("seed", solver.seed)

    asec = raw.get("admissibility", {})
    horizons = [float(tok) for tok in asec.get("horizons", "1").replace(",", " ").split()]
    adm_tol = float(asec.get("tol", "1e-8"))
    mik_cap = float(asec.get("mikhlin_cap", "64"))

    return RunConfig(
        grid=grid,
        symbol=symbol,
        solver=solver,
        preset=preset,
        preset_params=preset_params,
        horizons=horizons,
        adm_tol=adm_tol,
        mikhlin_cap=mik_cap,
        raw=raw,
    )
