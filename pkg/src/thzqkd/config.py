"""TOML scenario configuration: parsing, validation and defaults.

Every key is validated with a field-path-qualified error message.  Gains
may be given in dBi and are converted to linear units exactly once, here,
so the rest of the package only ever sees linear quantities.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import channel as ch
from .errors import ConfigError
from .physics import EnvironmentParams
from .scenario import Options, Scenario


@dataclass(frozen=True, eq=False)
class GridSpec:
    """Sweep grid: explicit values or a min/max range."""

    values: tuple[float, ...]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


@dataclass(frozen=True, eq=False)
class ScenarioConfig:
    """Parsed configuration: the scenario plus sweep/solver settings."""

    scenario: Scenario
    sweep_grids: dict = field(default_factory=dict)
    solver_bracket: tuple | None = None
    scenario_hash: str = ""


def _ctx(path: str, message: str) -> ConfigError:
    return ConfigError(f"{path}: {message}")


def _get(table: dict, path: str, key: str, kind, required=True, default=None):
    full = f"{path}.{key}" if path else key
    if key not in table:
        if required:
            raise _ctx(full, "missing required key")
        return default
    val = table[key]
    if kind is float and isinstance(val, bool):
        raise _ctx(full, "expected a number, got a boolean")
    if kind is float and isinstance(val, (int, float)):
        return float(val)
    if kind is int:
        if isinstance(val, bool) or not isinstance(val, int):
            raise _ctx(full, "expected an integer")
        return val
    if kind is bool:
        if not isinstance(val, bool):
            raise _ctx(full, "expected a boolean")
        return val
    if kind is str:
        if not isinstance(val, str):
            raise _ctx(full, "expected a string")
        return val
    if kind is list:
        if not isinstance(val, list):
            raise _ctx(full, "expected an array")
        return val
    if kind is dict:
        if not isinstance(val, dict):
            raise _ctx(full, "expected a table")
        return val
    raise AssertionError(kind)


_KNOWN_SECTIONS = {"environment", "arrays", "channel", "absorption", "options",
                   "sweep", "solver"}


def parse_config(text: str, base_dir: str | Path | None = None) -> ScenarioConfig:
    """Parse and validate a TOML scenario document."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error: {exc}") from exc
    unknown = set(raw) - _KNOWN_SECTIONS
    if unknown:
        raise ConfigError(f"unknown config section(s): {sorted(unknown)}")

    env_tbl = _get(raw, "", "environment", dict)
    env = _parse_environment(env_tbl)
    arrays = _parse_arrays(_get(raw, "", "arrays", dict))
    paths = _parse_paths(_get(raw, "", "channel", dict))
    absorption = _parse_absorption(raw.get("absorption"), base_dir)
    options = _parse_options(raw.get("options"))
    scenario = Scenario(environment=env, arrays=arrays, paths=paths,
                        absorption=absorption, options=options)
    # reachability check: the carrier must be inside the absorption table
    absorption.delta_db_per_km(env.carrier_frequency_hz)
    grids = _parse_sweeps(raw.get("sweep"))
    bracket = _parse_solver(raw.get("solver"))
    return ScenarioConfig(scenario=scenario, sweep_grids=grids,
                          solver_bracket=bracket, scenario_hash=_hash_of(raw))


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, base_dir=path.parent)


def _hash_of(raw: dict) -> str:
    canon = json.dumps(raw, sort_keys=True, default=str).encode()
    return hashlib.sha256(canon).hexdigest()[:12]


def _parse_environment(tbl: dict) -> EnvironmentParams:
    f_c = _get(tbl, "environment", "carrier_frequency_hz", float)
    t_e = _get(tbl, "environment", "temperature_k", float)
    v_s = _get(tbl, "environment", "signal_variance", float)
    w = _get(tbl, "environment", "eve_noise_variance", float, required=False, default=1.0)
    try:
        return EnvironmentParams(carrier_frequency_hz=f_c, temperature_k=t_e,
                                 signal_variance=v_s, eve_noise_variance=w)
    except ValueError as exc:
        raise _ctx("environment", str(exc)) from exc


def _parse_arrays(tbl: dict) -> ch.ArrayConfig:
    n_tx = _get(tbl, "arrays", "n_tx", int)
    n_rx = _get(tbl, "arrays", "n_rx", int)
    gain_lin = _get(tbl, "arrays", "element_gain", float, required=False)
    gain_dbi = _get(tbl, "arrays", "element_gain_dbi", float, required=False)
    if (gain_lin is None) == (gain_dbi is None):
        raise _ctx("arrays", "give exactly one of element_gain (linear) or element_gain_dbi")
    gain = gain_lin if gain_lin is not None else 10.0 ** (gain_dbi / 10.0)
    spacing = _get(tbl, "arrays", "element_spacing_over_lambda", float,
                   required=False, default=0.5)
    try:
        return ch.ArrayConfig(n_tx=n_tx, n_rx=n_rx, element_gain=gain,
                              element_spacing_over_lambda=spacing)
    except ValueError as exc:
        raise _ctx("arrays", str(exc)) from exc


def _parse_paths(tbl: dict) -> tuple[ch.PathSpec, ...]:
    distance = _get(tbl, "channel", "distance_m", float, required=False)
    path_tables = _get(tbl, "channel", "paths", list, required=False)
    if (distance is None) == (path_tables is None):
        raise _ctx("channel", "give exactly one of distance_m (single LoS link) or [[channel.paths]]")
    if distance is not None:
        if distance <= 0:
            raise _ctx("channel.distance_m", "must be > 0")
        return (ch.PathSpec(path_length_m=distance, is_los=True),)
    paths = []
    for i, ptbl in enumerate(path_tables):
        where = f"channel.paths[{i}]"
        if not isinstance(ptbl, dict):
            raise _ctx(where, "expected a table")
        fresnel = ptbl.get("fresnel_r", 1.0)
        if isinstance(fresnel, list):
            if len(fresnel) != 2 or not all(isinstance(v, (int, float)) for v in fresnel):
                raise _ctx(f"{where}.fresnel_r", "expected [re, im] or a number")
            fresnel = complex(fresnel[0], fresnel[1])
        elif isinstance(fresnel, (int, float)) and not isinstance(fresnel, bool):
            fresnel = complex(fresnel)
        else:
            raise _ctx(f"{where}.fresnel_r", "expected [re, im] or a number")
        try:
            paths.append(ch.PathSpec(
                path_length_m=_get(ptbl, where, "length_m", float),
                aod_rad=_get(ptbl, where, "aod_rad", float, required=False, default=0.0),
                aoa_rad=_get(ptbl, where, "aoa_rad", float, required=False, default=0.0),
                delay_s=_get(ptbl, where, "delay_s", float, required=False, default=0.0),
                is_los=_get(ptbl, where, "is_los", bool, required=False, default=False),
                roughness_beta=_get(ptbl, where, "roughness_beta", float,
                                    required=False, default=1.0),
                fresnel_r=fresnel,
            ))
        except ValueError as exc:
            raise _ctx(where, str(exc)) from exc
    los = [p for p in paths if p.is_los]
    if len(los) != 1:
        raise _ctx("channel.paths", f"exactly one path must have is_los = true, got {len(los)}")
    if los[0].path_length_m > min(p.path_length_m for p in paths):
        raise _ctx("channel.paths", "the LoS path must have the minimal length")
    return tuple(paths)


def _parse_absorption(tbl, base_dir) -> ch.AbsorptionTable:
    if tbl is None:
        return ch.default_absorption_table()
    if not isinstance(tbl, dict):
        raise _ctx("absorption", "expected a table")
    bands = tbl.get("bands")
    file_ = tbl.get("file")
    if (bands is None) == (file_ is None):
        raise _ctx("absorption", "give exactly one of bands or file")
    if bands is not None:
        if not isinstance(bands, list):
            raise _ctx("absorption.bands", "expected an array of [lo_hz, hi_hz, delta_db_per_km]")
        parsed = []
        for i, band in enumerate(bands):
            if (not isinstance(band, list) or len(band) != 3
                    or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in band)):
                raise _ctx(f"absorption.bands[{i}]", "expected [lo_hz, hi_hz, delta_db_per_km]")
            parsed.append(tuple(float(v) for v in band))
        return ch.AbsorptionTable(parsed, closed="right")
    if not isinstance(file_, str):
        raise _ctx("absorption.file", "expected a path string")
    path = Path(file_)
    if not path.is_absolute() and base_dir is not None:
        path = Path(base_dir) / path
    return ch.AbsorptionTable.from_csv(path)


def _parse_options(tbl) -> Options:
    if tbl is None:
        return Options()
    if not isinstance(tbl, dict):
        raise _ctx("options", "expected a table")
    kwargs = {}
    if "method" in tbl:
        kwargs["method"] = _get(tbl, "options", "method", str)
    if "clamp_negative_channels" in tbl:
        kwargs["clamp_negative_channels"] = _get(tbl, "options", "clamp_negative_channels", bool)
    if "fresnel_mode" in tbl:
        kwargs["fresnel_mode"] = _get(tbl, "options", "fresnel_mode", str)
    if "rank_tolerance" in tbl:
        kwargs["rank_tolerance"] = _get(tbl, "options", "rank_tolerance", float)
    if "zeta_constant_mode" in tbl:
        kwargs["zeta_constant_mode"] = _get(tbl, "options", "zeta_constant_mode", str)
    unknown = set(tbl) - {"method", "clamp_negative_channels", "fresnel_mode",
                          "rank_tolerance", "zeta_constant_mode"}
    if unknown:
        raise _ctx("options", f"unknown key(s): {sorted(unknown)}")
    return Options(**kwargs)


_SWEEP_KEYS = {"distance_m", "frequency_hz", "temperature_k"}


def _parse_sweeps(tbl) -> dict:
    if tbl is None:
        return {}
    if not isinstance(tbl, dict):
        raise _ctx("sweep", "expected a table")
    unknown = set(tbl) - _SWEEP_KEYS
    if unknown:
        raise _ctx("sweep", f"unknown key(s): {sorted(unknown)}")
    grids = {}
    for key, sub in tbl.items():
        where = f"sweep.{key}"
        if not isinstance(sub, dict):
            raise _ctx(where, "expected a table")
        if "values" in sub:
            vals = _get(sub, where, "values", list)
            if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals):
                raise _ctx(f"{where}.values", "expected an array of numbers")
            values = tuple(float(v) for v in vals)
        else:
            lo = _get(sub, where, "min", float)
            hi = _get(sub, where, "max", float)
            if not lo < hi:
                raise _ctx(where, "need min < max")
            if "step" in sub:
                step = _get(sub, where, "step", float)
                if step <= 0:
                    raise _ctx(f"{where}.step", "must be > 0")
                n = int(round((hi - lo) / step)) + 1
                values = tuple(np.linspace(lo, hi, n))
            else:
                points = _get(sub, where, "points", int, required=False, default=51)
                if points < 2:
                    raise _ctx(f"{where}.points", "must be >= 2")
                log = _get(sub, where, "log", bool, required=False,
                           default=(key == "distance_m"))
                if log:
                    if lo <= 0:
                        raise _ctx(where, "log spacing needs min > 0")
                    values = tuple(np.logspace(math.log10(lo), math.log10(hi), points))
                else:
                    values = tuple(np.linspace(lo, hi, points))
        if any(b <= a for a, b in zip(values, values[1:])) or not values:
            raise _ctx(where, "grid must be nonempty and strictly increasing")
        grids[key] = GridSpec(values=values)
    return grids


def _parse_solver(tbl) -> tuple | None:
    if tbl is None:
        return None
    if not isinstance(tbl, dict):
        raise _ctx("solver", "expected a table")
    unknown = set(tbl) - {"d_lo_m", "d_hi_m"}
    if unknown:
        raise _ctx("solver", f"unknown key(s): {sorted(unknown)}")
    lo = _get(tbl, "solver", "d_lo_m", float)
    hi = _get(tbl, "solver", "d_hi_m", float)
    if not 0 < lo < hi:
        raise _ctx("solver", "need 0 < d_lo_m < d_hi_m")
    return (lo, hi)
