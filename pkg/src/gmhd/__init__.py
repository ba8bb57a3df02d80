"""Numerical laboratory for 2D magnetohydrodynamics with generalized
magnetic diffusion.

The dissipation acting on the magnetic field is a radial Fourier multiplier
|xi|^2 g(|xi|) where g is positive and non-decreasing.  The package certifies
when such a symbol is strong enough for the decay machinery to close
(admissibility), verifies the semigroup kernel estimates that certification
feeds, and integrates the coupled system pseudo-spectrally while monitoring
the a-priori quantities the theory tracks.
"""

__version__ = "0.1.0"

from .admissibility import (
    AdmissibilityReport,
    Verdict,
    admissibility_integral,
    assess,
    assess_many,
    growth_integral_from,
    threshold_wavenumber,
)
from .diagnostics import (
    MonitorSummary,
    cancellation_residuals,
    comparison_table,
    energy_residual,
    interpolation_chain_ratio,
    monitor,
    vorticity_current_residual,
)
from .errors import (
    BracketError,
    DomainError,
    GmhdError,
    GridMismatchError,
    InstabilityError,
    ParameterError,
    ToleranceError,
    ZeroFieldError,
)
from .kernel_analysis import (
    decay_time_integral_identity,
    hessian_bound_components,
    kernel_hs_norm,
    kernel_linf,
    moment_integral,
    moment_ratio_scan,
    spectral_l1_ratio,
)
from .presets import make_initial, orszag_tang, random_band, taylor_green
from .snapshot import read_snapshot, write_snapshot
from .solver import Ledger, SolverConfig, State, run
from .spectral import Grid, gradient_split_constants
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
    make_symbol,
    monotonicity_check,
)

__all__ = [
    "__version__",
    "AdmissibilityReport", "Verdict", "admissibility_integral", "assess",
    "assess_many", "growth_integral_from", "threshold_wavenumber",
    "MonitorSummary", "cancellation_residuals", "comparison_table",
    "energy_residual", "interpolation_chain_ratio", "monitor",
    "vorticity_current_residual",
    "BracketError", "DomainError", "GmhdError", "GridMismatchError",
    "InstabilityError", "ParameterError", "ToleranceError", "ZeroFieldError",
    "decay_time_integral_identity", "hessian_bound_components",
    "kernel_hs_norm", "kernel_linf", "moment_integral", "moment_ratio_scan",
    "spectral_l1_ratio",
    "make_initial", "orszag_tang", "random_band", "taylor_green",
    "read_snapshot", "write_snapshot",
    "Ledger", "SolverConfig", "State", "run",
    "Grid", "gradient_split_constants",
    "Constant", "LogLogLog", "LogPower", "MikhlinReport", "Power", "PowerLog",
    "Symbol", "Tabulated", "check_mikhlin", "make_symbol", "monotonicity_check",
]
