"""Command-line interface.

Five subcommands, each writing one data CSV plus a JSON manifest beside
it: run (per-realization trajectories), sweep (one-axis parameter scan),
susceptibility (finite-difference panic response), rescue (bailout
benefit), meanfield (basin map of the homogenized dynamics).  Identical
config and seed reproduce the data file byte for byte.
"""

import argparse
import sys
import time
from dataclasses import replace

from . import __version__, analysis
from .config import (RunConfig, apply_overrides, canonical_items,
                     canonical_text, parse_config, to_model_params)
from .engine import run_ensemble
from .errors import ConfigError, InvalidParameterError
from .meanfield import MeanFieldParams, basin_map
from .output import write_csv, write_manifest
from .seeding import RESCUE_TAG, SUSCEPTIBILITY_TAG, derive_seed


def command_run(config):
    params = to_model_params(config)
    ens = run_ensemble(params, config.realizations)
    rows = []
    for k, r in enumerate(ens.realizations):
        onset = r.panic_onset_step
        for t, nd in enumerate(r.nd_trajectory):
            rows.append((k, t, int(nd), onset is not None and t >= onset,
                         int(r.rescues_trajectory[t])))
    stats = analysis.aggregate(ens)
    summary = {
        "nd_mean": stats.nd_mean,
        "nd_std": stats.nd_std,
        "nd_over_n_mean": stats.nd_over_n_mean,
        "nd_over_n_std": stats.nd_over_n_std,
        "realizations": config.realizations,
    }
    header = ["realization", "t", "nd_cum", "panic_active", "rescues_used"]
    return header, rows, summary


def command_sweep(config):
    if not config.values:
        raise ConfigError("sweep needs a values list")
    base = to_model_params(config, require_j0=config.axis != "j0")
    table = analysis.sweep(base, config.axis, config.values,
                           config.realizations)
    rows = []
    for pt in table.points:
        v = pt.value
        cell = f"{v[0]!r}:{v[1]!r}" if isinstance(v, tuple) else v
        p = pt.params
        rows.append((table.axis, cell, p.n, p.h, p.bailout_budget, p.p0, p.q0,
                     config.realizations, pt.stats.nd_mean, pt.stats.nd_std,
                     pt.stats.nd_over_n_mean, pt.stats.nd_over_n_std))
    best = max(table.points, key=lambda pt: pt.stats.nd_over_n_mean)
    summary = {
        "points": len(rows),
        "max_nd_over_n_mean": best.stats.nd_over_n_mean,
        "realizations": config.realizations,
    }
    header = ["axis", "value", "n", "h", "b", "p0", "q0", "realizations",
              "nd_mean", "nd_std", "nd_over_n_mean", "nd_over_n_std"]
    return header, rows, summary


def _j0_points(config):
    """The j0 list a susceptibility or rescue command scans, sorted."""
    if config.values is not None:
        points = []
        for v in config.values:
            if isinstance(v, tuple):
                raise ConfigError("this command expects scalar j0 values")
            points.append(float(v))
        return sorted(points)
    if config.j0 is None:
        raise ConfigError("j0 is required when no values list is given")
    return [config.j0]


def command_susceptibility(config):
    base = to_model_params(config, require_j0=config.values is None)
    rows = []
    chis = []
    for k, j0 in enumerate(_j0_points(config)):
        seed = derive_seed(config.seed, SUSCEPTIBILITY_TAG, k)
        est = analysis.susceptibility(
            replace(base, j0=j0, master_seed=seed),
            delta_h=config.delta_h,
            realization_count=config.realizations,
            paired=True)
        rows.append((j0, est.delta_h, est.chi, est.chi_std,
                     est.realization_count))
        chis.append((est.chi, j0))
    peak = max(chis)
    summary = {"points": len(rows), "max_chi": peak[0],
               "argmax_j0": peak[1], "realizations": config.realizations}
    header = ["j0", "delta_h", "chi", "chi_std", "realizations"]
    return header, rows, summary


def command_rescue(config):
    base = to_model_params(config, require_j0=config.values is None)
    b_values = config.b_values if config.b_values else [0, 1, 5, 10]
    rows = []
    best = 0.0
    for k, j0 in enumerate(_j0_points(config)):
        seed = derive_seed(config.seed, RESCUE_TAG, k)
        points = analysis.rescue_benefit(
            replace(base, j0=j0, master_seed=seed),
            b_values, config.realizations)
        for pt in points:
            rows.append((j0, base.h, pt.b, pt.delta_nd_over_n,
                         config.realizations))
            best = max(best, pt.delta_nd_over_n)
    summary = {"points": len(rows), "max_delta_nd_over_n": best,
               "realizations": config.realizations}
    header = ["j0", "h", "b", "delta_nd_over_n", "realizations"]
    return header, rows, summary


def command_meanfield(config):
    if config.jtilde is None:
        raise ConfigError("jtilde is required for the meanfield command")
    params = MeanFieldParams(jtilde=config.jtilde, h=config.h,
                             tol=config.tol, max_iter=config.max_iter)
    grid = basin_map(params, config.resolution)
    rows = [(c.p0, c.q0, c.p_inf, c.q_inf, c.converged, c.iterations)
            for c in grid.cells]
    converged = [c for c in grid.cells if c.converged]
    summary = {
        "cells": len(grid.cells),
        "converged_cells": len(converged),
        "p_inf_min": min(c.p_inf for c in converged) if converged else None,
        "p_inf_max": max(c.p_inf for c in converged) if converged else None,
    }
    header = ["p0", "q0", "p_inf", "q_inf", "converged", "iterations"]
    return header, rows, summary


COMMANDS = {
    "run": command_run,
    "sweep": command_sweep,
    "susceptibility": command_susceptibility,
    "rescue": command_rescue,
    "meanfield": command_meanfield,
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="cascade-sim",
        description="Credit-rating cascade simulator and analysis tool")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "run": "simulate one ensemble and write per-realization trajectories",
        "sweep": "scan one parameter axis, one ensemble per value",
        "susceptibility": "finite-difference response to the panic amplitude",
        "rescue": "default reduction from bailout budgets",
        "meanfield": "basin map of the homogenized dynamics",
    }
    for name, h in helps.items():
        p = sub.add_parser(name, help=h)
        p.add_argument("--config", help="path to a key = value config file")
        p.add_argument("--seed", type=int, help="master seed override")
        p.add_argument("--out", help="data CSV path (manifest written beside)")
        p.add_argument("--realizations", type=int,
                       help="ensemble size override")
        p.add_argument("overrides", nargs="*", metavar="key=value",
                       help="config overrides applied before flag overrides")
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.config is not None:
            with open(args.config, "r", encoding="utf-8") as f:
                config = parse_config(f.read())
        else:
            config = RunConfig()
        apply_overrides(config, args.overrides)
        flag_pairs = []
        if args.seed is not None:
            flag_pairs.append(f"seed={args.seed}")
        if args.realizations is not None:
            flag_pairs.append(f"realizations={args.realizations}")
        if args.out is not None:
            flag_pairs.append(f"out={args.out}")
        apply_overrides(config, flag_pairs)
        started = time.monotonic()
        header, rows, summary = COMMANDS[args.command](config)
        out_path = config.out or f"{args.command}.csv"
        write_csv(out_path, header, rows)
        manifest = {
            "tool": "cascade-sim",
            "version": __version__,
            "command": args.command,
            "master_seed": config.seed,
            "config": dict(canonical_items(config)),
            "config_text": canonical_text(config),
            "summary": summary,
            "duration_seconds": time.monotonic() - started,
            "data_file": out_path,
        }
        write_manifest(out_path + ".manifest.json", manifest)
        print(f"{args.command}: wrote {out_path} ({len(rows)} rows)")
        return 0
    except (ConfigError, InvalidParameterError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
