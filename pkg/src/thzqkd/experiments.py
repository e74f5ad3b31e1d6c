"""Parameter sweeps and max-distance root finding.

Produces the three figure families as tables: rate vs distance, the
feasibility coefficient vs temperature, and max distance vs frequency.
Every table row is a plain dict; per-point failures are recorded in-row so
a sweep never aborts halfway.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import bisect

from . import keyrate as kr
from .errors import BracketError, ConfigError, NumericsError
from .scenario import Scenario

logger = logging.getLogger(__name__)

SWEEPABLE = ("distance_m", "frequency_hz", "temperature_k")

BISECTION_RTOL = 1e-4


def default_distance_grid(points: int = 101) -> np.ndarray:
    """Log-spaced distances, 1 cm to 1 km."""
    return np.logspace(-2, 3, points)


def default_frequency_grid(step_hz: float = 0.1e12) -> np.ndarray:
    """10 to 30 THz inclusive."""
    n = int(round((30e12 - 10e12) / step_hz)) + 1
    return np.linspace(10e12, 30e12, n)


def default_temperature_grid(points: int = 301) -> np.ndarray:
    """100 to 400 K inclusive."""
    return np.linspace(100.0, 400.0, points)


@dataclass(frozen=True, eq=False)
class SweepSpec:
    swept_parameter: str
    grid: Sequence[float]
    scenario: Scenario
    methods: tuple[str, ...] = ("large_modulation",)

    def __post_init__(self):
        if self.swept_parameter not in SWEEPABLE:
            raise ConfigError(f"swept_parameter must be one of {SWEEPABLE}")
        grid = tuple(float(g) for g in self.grid)
        if not grid:
            raise ConfigError("sweep grid must be nonempty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("sweep grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        for m in self.methods:
            if m not in kr.METHODS:
                raise ConfigError(f"unknown method {m!r}")


@dataclass(eq=False)
class SweepTable:
    """Columns + dict rows + metadata; the unit all reports are built from."""

    columns: tuple[str, ...]
    rows: list[dict] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)


def _vary(scenario: Scenario, parameter: str, value: float) -> Scenario:
    if parameter == "distance_m":
        return scenario.with_distance(value)
    if parameter == "frequency_hz":
        return scenario.with_frequency(value)
    return scenario.with_temperature(value)


def evaluate_point(scenario: Scenario, method: str) -> dict:
    """Rate, feasibility and per-channel breakdown at one operating point."""
    dec = scenario.parallel_channels()
    breakdown = kr.rate_mimo(dec, scenario.environment, method=method,
                             clamp_negative_channels=scenario.options.clamp_negative_channels,
                             zeta_constant_mode=scenario.options.zeta_constant_mode)
    feas = kr.feasibility_threshold(dec, scenario.environment,
                                    constant_mode=scenario.options.zeta_constant_mode)
    return {
        "method": method,
        "total_rate_bits": breakdown.total_rate_bits,
        "per_channel_rates": [c.rate_bits for c in breakdown.per_channel],
        "zeta": feas.zeta,
        "alpha": feas.alpha,
        "feasible": feas.feasible,
        "error": "",
    }


def sweep(spec: SweepSpec) -> SweepTable:
    """One row per (grid value x method); errors recorded in-row."""
    columns = (spec.swept_parameter, "method", "total_rate_bits",
               "per_channel_rates", "zeta", "alpha", "feasible", "error")
    table = SweepTable(columns=columns)
    table.metadata.update({
        "sweep_parameter": spec.swept_parameter,
        "methods": ",".join(spec.methods),
        "plot_x": spec.swept_parameter,
        "plot_y": "zeta" if spec.swept_parameter == "temperature_k" else "total_rate_bits",
        "plot_group": "method",
        "plot_logx": "true" if spec.swept_parameter == "distance_m" else "false",
        "plot_logy": "false" if spec.swept_parameter == "temperature_k" else "true",
    })
    for value in spec.grid:
        for method in spec.methods:
            row = {spec.swept_parameter: value, "method": method,
                   "total_rate_bits": None, "per_channel_rates": None,
                   "zeta": None, "alpha": None, "feasible": None, "error": ""}
            try:
                point = _vary(spec.scenario, spec.swept_parameter, value)
                row.update(evaluate_point(point, method))
                row["method"] = method
            except (ValueError, NumericsError) as exc:
                row["error"] = str(exc)
            table.rows.append(row)
    return table


@dataclass(frozen=True)
class MaxDistanceResult:
    distance_m: float
    rate_at_solution: float
    target_rate: float
    method: str
    evaluations: int


def _rate_at(scenario: Scenario, distance_m: float, method: str) -> float:
    return scenario.with_distance(distance_m).rate(method).total_rate_bits


def max_distance(scenario: Scenario, target_rate: float, method: str | None = None,
                 d_lo: float = 0.01, d_hi: float = 1000.0,
                 rtol: float = BISECTION_RTOL) -> MaxDistanceResult:
    """Bisect for the distance where the total rate crosses target_rate.

    Requires rate(d_lo) > target_rate > rate(d_hi); the rate is monotone
    decreasing in distance for a fixed geometry, which the bracket check
    guards.  Terminates at relative width rtol in distance.
    """
    if target_rate <= 0:
        raise ConfigError("target_rate must be positive")
    if not 0 < d_lo < d_hi:
        raise ConfigError("need 0 < d_lo < d_hi")
    method = method or scenario.options.method
    rate_lo = _rate_at(scenario, d_lo, method)
    rate_hi = _rate_at(scenario, d_hi, method)
    evals = 2
    if not (rate_lo > target_rate > rate_hi):
        raise BracketError(
            f"target rate {target_rate:g} not bracketed: rate({d_lo:g} m) = "
            f"{rate_lo:g}, rate({d_hi:g} m) = {rate_hi:g}",
            rate_lo=rate_lo, rate_hi=rate_hi,
        )

    calls = [0]

    def objective(d):
        calls[0] += 1
        return _rate_at(scenario, d, method) - target_rate

    root = bisect(objective, d_lo, d_hi, rtol=rtol, xtol=1e-12)
    rate_root = _rate_at(scenario, root, method)
    evals += calls[0] + 1
    # posterior consistency: the residual should not exceed the rate change
    # across one tolerance-width step
    width = max(root * rtol, 1e-12)
    local_span = abs(_rate_at(scenario, max(root - width, d_lo), method)
                     - _rate_at(scenario, root + width, method))
    evals += 2
    residual = abs(rate_root - target_rate)
    if residual > local_span + 1e-15:
        logger.warning("max_distance posterior check: residual %.3g exceeds local span %.3g",
                       residual, local_span)
    else:
        logger.debug("max_distance solve: d=%.6g m, residual %.3g within local span %.3g",
                     root, residual, local_span)
    return MaxDistanceResult(distance_m=float(root), rate_at_solution=rate_root,
                             target_rate=target_rate, method=method, evaluations=evals)


def auto_bracket(scenario: Scenario, target_rate: float, method: str | None = None,
                 d_min: float = 0.01, d_max: float = 1e6) -> tuple[float, float]:
    """Find a bracketing [d_lo, d_hi] for max_distance.

    Starts at d_min, doubling past any distances where the passive-channel
    model is violated (transmittance above 1), then doubles d_hi until the
    rate falls below target.
    """
    method = method or scenario.options.method
    d_lo = d_min
    while d_lo < d_max:
        try:
            rate_lo = _rate_at(scenario, d_lo, method)
            break
        except NumericsError:
            d_lo *= 2.0
    else:
        raise BracketError(f"no physical distance found below {d_max:g} m")
    if rate_lo <= target_rate:
        raise BracketError(
            f"rate {rate_lo:g} at the closest physical distance {d_lo:g} m "
            f"does not exceed the target {target_rate:g}",
            rate_lo=rate_lo,
        )
    d_hi = 2.0 * d_lo
    while True:
        if d_hi > d_max:
            raise BracketError(f"rate stays above target out to {d_max:g} m")
        if _rate_at(scenario, d_hi, method) < target_rate:
            return d_lo, d_hi
        d_hi *= 2.0


def frequency_profile(scenario: Scenario, target_rate: float,
                      freq_grid: Sequence[float] | None = None,
                      method: str | None = None) -> SweepTable:
    """Max distance per carrier frequency; infeasible points are flagged.

    Discontinuities appear exactly at the absorption-table band edges with
    the default table.
    """
    grid = default_frequency_grid() if freq_grid is None else np.asarray(freq_grid, dtype=float)
    method = method or scenario.options.method
    columns = ("frequency_hz", "target_rate_bits", "method", "max_distance_m",
               "rate_at_solution_bits", "feasible", "error")
    table = SweepTable(columns=columns)
    table.metadata.update({
        "target_rate_bits": repr(float(target_rate)),
        "plot_x": "frequency_hz",
        "plot_y": "max_distance_m",
        "plot_logx": "false",
        "plot_logy": "true",
    })
    for f in grid:
        row = {"frequency_hz": float(f), "target_rate_bits": target_rate,
               "method": method, "max_distance_m": None,
               "rate_at_solution_bits": None, "feasible": None, "error": ""}
        try:
            point = scenario.with_frequency(float(f))
            feasible = None
            try:
                feasible = point.feasibility().feasible
            except NumericsError:
                pass  # configured distance unphysical; the bracket search decides
            if feasible is False:
                row["feasible"] = False
                row["error"] = "infeasible: zeta <= alpha"
            else:
                d_lo, d_hi = auto_bracket(point, target_rate, method)
                res = max_distance(point, target_rate, method, d_lo, d_hi)
                row.update(max_distance_m=res.distance_m,
                           rate_at_solution_bits=res.rate_at_solution,
                           feasible=True)
        except BracketError as exc:
            row["feasible"] = False
            row["error"] = f"infeasible: {exc}"
        except (ValueError, NumericsError) as exc:
            row["error"] = str(exc)
        table.rows.append(row)
    return table
