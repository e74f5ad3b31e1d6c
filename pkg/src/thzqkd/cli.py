"""Command-line interface.

Subcommands: rate, sweep-distance, sweep-frequency, sweep-temperature-zeta,
max-distance, mc-validate.  Exit codes: 0 success, 1 configuration or
validation error, 2 numerical failure.  Diagnostics go to stderr, a
one-line summary to stdout.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from . import experiments as ex
from . import keyrate as kr
from . import montecarlo as mc
from .config import load_config
from .csvio import emit_plot_script, write_csv
from .errors import ConfigError, NumericsError
from .experiments import SweepTable
from .physics import CONSTANTS_VERSION, vacuum_variance


def _base_metadata(cfg) -> dict:
    return {
        "tool": f"thzqkd {__version__}",
        "constants": CONSTANTS_VERSION,
        "scenario": cfg.scenario_hash,
    }


def _add_common(p, with_plot=False):
    p.add_argument("--config", required=True, help="scenario TOML file")
    p.add_argument("--out", help="write the result table to this CSV path")
    p.add_argument("--method", help="rate method(s), comma separated "
                   "(exact, large_modulation, taylor); default from config")
    p.add_argument("--emit-plot-script", metavar="PATH",
                   help="write a standalone matplotlib script next to the CSV (needs --out)")
    if with_plot:
        p.add_argument("--plot", metavar="PATH", help="render the table to a PNG figure")


def _methods_from(args, cfg) -> tuple[str, ...]:
    if not args.method:
        return (cfg.scenario.options.method,)
    methods = tuple(m.strip() for m in args.method.split(",") if m.strip())
    for m in methods:
        if m not in kr.METHODS:
            raise ConfigError(f"unknown method {m!r}; expected one of {kr.METHODS}")
    return methods


def _finish_table(args, cfg, table: SweepTable, summary: str) -> int:
    table.metadata = {**_base_metadata(cfg), **table.metadata}
    if args.emit_plot_script and not args.out:
        raise ConfigError("--emit-plot-script requires --out (the script reads the CSV)")
    if args.out:
        write_csv(table, args.out)
    if args.emit_plot_script:
        emit_plot_script(table, args.emit_plot_script, args.out)
    if getattr(args, "plot", None):
        from .plotting import render_figure  # matplotlib import deferred to use

        render_figure(table, args.plot)
    print(summary)
    return 0


def _cmd_rate(args) -> int:
    cfg = load_config(args.config)
    method = _methods_from(args, cfg)[0]
    scenario = cfg.scenario
    breakdown = scenario.rate(method)
    feas = scenario.feasibility()
    table = SweepTable(columns=("channel", "transmittance", "mutual_info_bits",
                                "holevo_bits", "rate_bits"))
    for i, chan in enumerate(breakdown.per_channel):
        table.rows.append({
            "channel": i,
            "transmittance": chan.transmittance,
            "mutual_info_bits": chan.mutual_info_bits,
            "holevo_bits": chan.holevo_bits,
            "rate_bits": chan.rate_bits,
        })
    table.metadata.update({
        "method": method,
        "total_rate_bits": repr(breakdown.total_rate_bits),
        "zeta": repr(feas.zeta),
        "alpha": repr(feas.alpha),
        "feasible": "true" if feas.feasible else "false",
    })
    per = ",".join(f"{c.rate_bits:.6g}" for c in breakdown.per_channel)
    summary = (f"total_rate_bits={breakdown.total_rate_bits:.6g} method={method} "
               f"channels={len(breakdown.per_channel)} per_channel=[{per}] "
               f"zeta={feas.zeta:.6g} alpha={feas.alpha:.6g} "
               f"feasible={'true' if feas.feasible else 'false'}")
    return _finish_table(args, cfg, table, summary)


def _grid_for(cfg, key, default):
    grid = cfg.sweep_grids.get(key)
    return grid.as_array() if grid is not None else default


def _cmd_sweep(args, parameter: str) -> int:
    cfg = load_config(args.config)
    methods = _methods_from(args, cfg)
    defaults = {
        "distance_m": ex.default_distance_grid(),
        "frequency_hz": ex.default_frequency_grid(),
        "temperature_k": ex.default_temperature_grid(),
    }
    grid = _grid_for(cfg, parameter, defaults[parameter])
    spec = ex.SweepSpec(swept_parameter=parameter, grid=grid,
                        scenario=cfg.scenario, methods=methods)
    table = ex.sweep(spec)
    failed = sum(1 for r in table.rows if r["error"])
    summary = (f"swept {parameter} over {len(spec.grid)} points x "
               f"{len(methods)} method(s): {len(table.rows)} rows"
               + (f", {failed} failed" if failed else "")
               + (f" -> {args.out}" if args.out else ""))
    return _finish_table(args, cfg, table, summary)


def _cmd_max_distance(args) -> int:
    cfg = load_config(args.config)
    method = _methods_from(args, cfg)[0]
    scenario = cfg.scenario
    target = args.target_rate
    if args.profile:
        grid = _grid_for(cfg, "frequency_hz", ex.default_frequency_grid())
        table = ex.frequency_profile(scenario, target, grid, method)
        solved = [r for r in table.rows if r["max_distance_m"] is not None]
        summary = (f"max-distance profile over {len(grid)} frequencies: "
                   f"{len(solved)} solved, {len(table.rows) - len(solved)} infeasible/failed"
                   + (f" -> {args.out}" if args.out else ""))
        return _finish_table(args, cfg, table, summary)
    if args.d_lo is not None or args.d_hi is not None:
        if args.d_lo is None or args.d_hi is None:
            raise ConfigError("give both --d-lo and --d-hi, or neither")
        d_lo, d_hi = args.d_lo, args.d_hi
    elif cfg.solver_bracket is not None:
        d_lo, d_hi = cfg.solver_bracket
    else:
        d_lo, d_hi = ex.auto_bracket(scenario, target, method)
    res = ex.max_distance(scenario, target, method, d_lo, d_hi)
    table = SweepTable(columns=("frequency_hz", "target_rate_bits", "method",
                                "max_distance_m", "rate_at_solution_bits",
                                "feasible", "error"))
    table.rows.append({
        "frequency_hz": scenario.environment.carrier_frequency_hz,
        "target_rate_bits": target,
        "method": method,
        "max_distance_m": res.distance_m,
        "rate_at_solution_bits": res.rate_at_solution,
        "feasible": True,
        "error": "",
    })
    summary = (f"max_distance_m={res.distance_m:.6g} target_rate={target:g} "
               f"method={method} rate_at_solution={res.rate_at_solution:.6g}")
    return _finish_table(args, cfg, table, summary)


def _cmd_mc_validate(args) -> int:
    cfg = load_config(args.config)
    scenario = cfg.scenario
    env = scenario.environment
    dec = scenario.parallel_channels()
    run = mc.simulate(dec, env, args.rounds, args.seed)
    mi_emp = mc.empirical_mutual_information(run)
    v0 = vacuum_variance(env)
    va = env.signal_variance + v0
    w = env.eve_noise_variance
    table = SweepTable(columns=("channel", "transmittance", "n_rounds",
                                "alice_var", "alice_var_expected",
                                "bob_var", "bob_var_expected",
                                "mi_bits", "mi_bits_expected", "mi_stderr_bits"))
    worst_sigma = 0.0
    for i, chan in enumerate(run.channels):
        t = chan.transmittance
        bob_expected = mc.expected_bob_variance(t, va, w)
        mi_expected = kr.mutual_information(t, env.signal_variance, v0, w)
        stderr = mc.mi_standard_error(t, env.signal_variance, v0, w, run.n_rounds)
        worst_sigma = max(worst_sigma, abs(mi_emp[i] - mi_expected) / stderr)
        table.rows.append({
            "channel": i,
            "transmittance": t,
            "n_rounds": run.n_rounds,
            "alice_var": float(np.var(chan.x_alice)),
            "alice_var_expected": env.signal_variance,
            "bob_var": float(np.var(chan.x_bob)),
            "bob_var_expected": bob_expected,
            "mi_bits": float(mi_emp[i]),
            "mi_bits_expected": mi_expected,
            "mi_stderr_bits": stderr,
        })
    table.metadata.update({
        "seed": str(run.seed),
        "n_rounds": str(run.n_rounds),
        "rng": run.rng_algorithm,
    })
    if args.dump_samples:
        _dump_samples(run, args.dump_samples, cfg)
    summary = (f"mc-validate: {len(run.channels)} channel(s), n={run.n_rounds}, "
               f"seed={run.seed}, max |MI - analytic| = {worst_sigma:.2f} stderr")
    return _finish_table(args, cfg, table, summary)


def _dump_samples(run, path, cfg) -> None:
    table = SweepTable(columns=("round", "channel", "quadrature", "x_alice", "x_bob"))
    table.metadata = {**_base_metadata(cfg), "seed": str(run.seed), "rng": run.rng_algorithm}
    for i, chan in enumerate(run.channels):
        for n in range(run.n_rounds):
            table.rows.append({
                "round": n,
                "channel": i,
                "quadrature": mc.QUADRATURES[chan.quadrature_choice[n]],
                "x_alice": float(chan.x_alice[n]),
                "x_bob": float(chan.x_bob[n]),
            })
    write_csv(table, path)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thzqkd",
        description="Secret key rates of continuous-variable QKD over "
                    "terahertz MIMO wireless channels",
    )
    parser.add_argument("--version", action="version", version=f"thzqkd {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rate", help="total and per-eigenmode key rate for one scenario")
    _add_common(p)

    p = sub.add_parser("sweep-distance", help="rate vs link distance")
    _add_common(p, with_plot=True)

    p = sub.add_parser("sweep-frequency", help="rate vs carrier frequency at fixed geometry")
    _add_common(p, with_plot=True)

    p = sub.add_parser("sweep-temperature-zeta",
                       help="feasibility coefficient (and rate) vs temperature")
    _add_common(p, with_plot=True)

    p = sub.add_parser("max-distance",
                       help="distance where the rate crosses a target (bisection)")
    _add_common(p, with_plot=True)
    p.add_argument("--target-rate", type=float, required=True,
                   help="target secret key rate in bits per channel use")
    p.add_argument("--d-lo", type=float, help="bracket lower edge in meters")
    p.add_argument("--d-hi", type=float, help="bracket upper edge in meters")
    p.add_argument("--profile", action="store_true",
                   help="solve per frequency over the sweep grid instead of a single point")

    p = sub.add_parser("mc-validate",
                       help="Monte Carlo check of the analytic variances and mutual information")
    _add_common(p)
    p.add_argument("--seed", type=int, default=1, help="64-bit RNG seed")
    p.add_argument("--rounds", type=int, default=100_000, help="protocol rounds per channel")
    p.add_argument("--dump-samples", metavar="PATH",
                   help="also write the raw per-round samples as CSV")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "rate": _cmd_rate,
        "sweep-distance": lambda a: _cmd_sweep(a, "distance_m"),
        "sweep-frequency": lambda a: _cmd_sweep(a, "frequency_hz"),
        "sweep-temperature-zeta": lambda a: _cmd_sweep(a, "temperature_k"),
        "max-distance": _cmd_max_distance,
        "mc-validate": _cmd_mc_validate,
    }
    try:
        return handlers[args.command](args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericsError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
